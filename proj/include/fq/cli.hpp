#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fq::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kUnknownProcess = 3,
  kMalformedGrid = 4,
  kBiasBudget = 5,
  kDomain = 6,
  kNumerical = 7,
};

/// A grid point. `square` is set when the token was written as sqrtX, so
/// callers that need value^2 can use X exactly.
struct GridValue {
  double value = 0.0;
  std::optional<double> square;
};

/// "x", "a,b,c", "sqrtX" or "start:stop:steps" (geometric, endpoints included).
std::vector<GridValue> parse_grid(const std::string& text);

/// Runs one command line (without the program name). Output goes to `out`
/// unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fq::cli
