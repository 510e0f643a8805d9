#include <cmath>
#include <sstream>

#include "fq/cli.hpp"
#include "fq/error.hpp"

namespace fq::cli {

namespace {

constexpr std::size_t kMaxSteps = 1000000;

double number(const std::string& token, const std::string& grid) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size() || !std::isfinite(v))
    fail(Errc::malformed_grid, "grid '" + grid + "': '" + token + "' is not a number");
  return v;
}

GridValue point(const std::string& token, const std::string& grid) {
  if (token.rfind("sqrt", 0) == 0) {
    const double sq = number(token.substr(4), grid);
    if (!(sq >= 0.0)) fail(Errc::malformed_grid, "grid '" + grid + "': sqrt of a negative number");
    return {std::sqrt(sq), sq};
  }
  return {number(token, grid), std::nullopt};
}

}  // namespace

std::vector<GridValue> parse_grid(const std::string& text) {
  if (text.empty()) fail(Errc::malformed_grid, "empty grid");
  std::vector<GridValue> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3 || text.back() == ':')
      fail(Errc::malformed_grid, "grid '" + text + "': expected start:stop:steps");
    const double start = point(parts[0], text).value;
    const double stop = point(parts[1], text).value;
    const double steps = number(parts[2], text);
    if (steps < 1 || steps != std::floor(steps) || steps > static_cast<double>(kMaxSteps))
      fail(Errc::malformed_grid, "grid '" + text + "': steps must be an integer in 1..1000000");
    if (!(start > 0.0 && stop > 0.0)) fail(Errc::malformed_grid, "grid '" + text + "': geometric grids need positive endpoints");
    const auto n = static_cast<std::size_t>(steps);
    if (n == 1) {
      if (start != stop) fail(Errc::malformed_grid, "grid '" + text + "': one step needs start == stop");
      return {{start, std::nullopt}};
    }
    const double ls = std::log(start);
    const double step = (std::log(stop) - ls) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = i == 0 ? start : i + 1 == n ? stop : std::exp(ls + step * static_cast<double>(i));
      out.push_back({v, std::nullopt});
    }
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) fail(Errc::malformed_grid, "grid '" + text + "': empty entry");
    out.push_back(point(item, text));
  }
  if (text.back() == ',') fail(Errc::malformed_grid, "grid '" + text + "': trailing comma");
  return out;
}

}  // namespace fq::cli
