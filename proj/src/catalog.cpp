#include "fq/catalog.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "fq/error.hpp"

namespace fq {

namespace {

constexpr double kPi = std::numbers::pi;

double parse_number(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    fail(Errc::invalid_argument, "process " + context + ": '" + text + "' is not a number");
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& context) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '/')) out.push_back(parse_number(item, context));
  if (out.empty()) fail(Errc::invalid_argument, "process " + context + ": empty value");
  return out;
}

int as_int(double v, const std::string& what) {
  if (v != std::floor(v) || v < 1.0 || v > 64.0) fail(Errc::invalid_argument, what + " must be an integer in 1..64");
  return static_cast<int>(v);
}

double factorial(int n) { return std::tgamma(n + 1.0); }

double product(const std::vector<double>& v) {
  double p = 1.0;
  for (double x : v) p *= x;
  return p;
}

// Closed forms as they are usually quoted for each process.

Transcription t_stationary(double c, double b) {
  return {std::sqrt(2.0 * c * std::pow(b / (2.0 * kPi), b - 1.0) * b / (b - 1.0)), -(b - 1.0) / 2.0, 0.0};
}

Transcription t_fou(double a, double rho) {
  const double k = std::sqrt(2.0 * a * std::tgamma(rho) * std::sin(kPi * rho / 2.0) * (1.0 + rho) / kPi) *
                   std::pow((1.0 + rho) / (2.0 * kPi), rho / 2.0);
  return {k, -rho / 2.0, 0.0};
}

Transcription t_ou(double a) { return {2.0 * std::sqrt(a) / kPi, -0.5, 0.0}; }

Transcription t_bm() { return {std::numbers::sqrt2 / kPi, -0.5, 0.0}; }

Transcription t_ibm(int m) {
  const double mm = m;
  const double k = std::pow(kPi, -(mm + 1.0)) * std::pow(mm + 1.0, mm + 0.5) * std::sqrt((2.0 * mm + 2.0) / (2.0 * mm + 1.0));
  return {k, -(mm + 0.5), 0.0};
}

Transcription t_fbm(double beta) {
  const double k = std::sqrt(std::tgamma(2.0 * beta) * std::sin(kPi * beta) * (1.0 + 2.0 * beta) / kPi) *
                   std::pow((1.0 + 2.0 * beta) / (2.0 * kPi), beta);
  return {k, -beta, 0.0};
}

Transcription t_fous(const std::vector<double>& a, double rho, int d) {
  const double k = std::sqrt(product(a)) *
                   std::pow(2.0 * std::tgamma(1.0 + rho) * std::sin(kPi * rho / 2.0) / std::pow(kPi, 1.0 + rho), d / 2.0) *
                   std::pow(factorial(d - 1), -(1.0 + rho) / 2.0) *
                   std::sqrt(std::pow((1.0 + rho) / 2.0, rho) * (1.0 + rho) / rho);
  return {k, -rho / 2.0, (1.0 + rho) * (d - 1) / 2.0};
}

Transcription t_ous(const std::vector<double>& a, int d) {
  const double k = std::sqrt(product(a)) * std::pow(2.0, (d + 1) / 2.0) / (std::pow(kPi, d) * factorial(d - 1));
  return {k, -0.5, static_cast<double>(d - 1)};
}

Transcription t_fbs(double beta, int d) {
  const double h = 1.0 + 2.0 * beta;
  const double k = std::pow(std::tgamma(h) * std::sin(kPi * beta) / std::pow(kPi, h), d / 2.0) *
                   std::pow(factorial(d - 1), -h / 2.0) * std::sqrt(std::pow(h / 2.0, 2.0 * beta) * h / (2.0 * beta));
  return {k, -beta, h * (d - 1) / 2.0};
}

Transcription t_bs(int d) { return {std::numbers::sqrt2 / (std::pow(kPi, d) * factorial(d - 1)), -0.5, static_cast<double>(d - 1)}; }

void check_keys(const ProcessSpec& spec, std::initializer_list<const char*> allowed, bool positional) {
  for (const auto& [key, _] : spec.params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(Errc::invalid_argument, "process " + spec.name + ": unknown parameter '" + key + "'");
  }
  if (!positional && !spec.positional.empty())
    fail(Errc::invalid_argument, "process " + spec.name + ": takes only key=value parameters");
}

}  // namespace

double ProcessSpec::get(const std::string& key, double fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second.size() != 1) fail(Errc::invalid_argument, "process " + name + ": '" + key + "' takes one value");
  return it->second.front();
}

std::vector<double> ProcessSpec::get_list(const std::string& key, std::size_t count, double fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return std::vector<double>(count, fallback);
  if (it->second.size() == 1) return std::vector<double>(count, it->second.front());
  if (it->second.size() != count)
    fail(Errc::invalid_argument, "process " + name + ": '" + key + "' needs 1 or " + std::to_string(count) + " values");
  return it->second;
}

std::string ProcessSpec::canonical() const {
  std::string out = name;
  char buf[64];
  bool first = true;
  auto sep = [&] {
    out += first ? ":" : ",";
    first = false;
  };
  for (double v : positional) {
    sep();
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  }
  for (const auto& [key, vals] : params) {
    sep();
    out += key + "=";
    for (std::size_t i = 0; i < vals.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
      out += (i ? "/" : "") + std::string(buf);
    }
  }
  return out;
}

ProcessSpec parse_process(const std::string& text) {
  ProcessSpec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (spec.name.empty()) fail(Errc::invalid_argument, "process: empty name");
  if (colon == std::string::npos) return spec;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) fail(Errc::invalid_argument, "process " + spec.name + ": empty parameter");
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      if (!spec.params.empty()) fail(Errc::invalid_argument, "process " + spec.name + ": positional values must come first");
      spec.positional.push_back(parse_number(item, spec.name));
      continue;
    }
    const std::string key = item.substr(0, eq);
    if (key.empty() || spec.params.count(key)) fail(Errc::invalid_argument, "process " + spec.name + ": bad or repeated key");
    spec.params[key] = parse_list(item.substr(eq + 1), spec.name);
  }
  return spec;
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"bm",  "diffusion", "bb", "ou",  "fou", "stationary", "ibm", "fbm",
                                                 "ous", "fous",      "fbs", "bs", "tbs", "rv",         "explicit"};
  return names;
}

Process make_process(const ProcessSpec& spec) {
  const std::string& n = spec.name;
  auto make = [&](SpectrumModel model, std::optional<CovarianceKernel> kernel, std::optional<Transcription> t) {
    return Process{spec, std::move(model), std::move(kernel), t};
  };

  if (n == "bm") {
    check_keys(spec, {}, false);
    return make(SpectrumModel::exact_bm(), kernels_cov::brownian_motion(), t_bm());
  }
  if (n == "diffusion") {
    check_keys(spec, {}, false);
    return make(SpectrumModel::gaussian_diffusion(), std::nullopt, t_bm());
  }
  if (n == "bb") {
    check_keys(spec, {}, false);
    return make(SpectrumModel::brownian_bridge(), kernels_cov::brownian_bridge(), t_bs(1));
  }
  if (n == "ou") {
    check_keys(spec, {"a"}, false);
    const double a = spec.get("a", 1.0);
    return make(SpectrumModel::ou(a), kernels_cov::fou(a, 1.0), t_ou(a));
  }
  if (n == "fou") {
    check_keys(spec, {"a", "rho"}, false);
    const double a = spec.get("a", 1.0);
    const double rho = spec.get("rho", 0.5);
    return make(SpectrumModel::fou(a, rho), kernels_cov::fou(a, rho), t_fou(a, rho));
  }
  if (n == "stationary") {
    check_keys(spec, {"c", "b"}, false);
    const double c = spec.get("c", 1.0);
    const double b = spec.get("b", 2.0);
    return make(SpectrumModel::stationary(c, b), std::nullopt, t_stationary(c, b));
  }
  if (n == "ibm") {
    check_keys(spec, {"m"}, false);
    const int m = as_int(spec.get("m", 1.0), "ibm: m");
    return make(SpectrumModel::ibm(m), kernels_cov::ibm(m), t_ibm(m));
  }
  if (n == "fbm") {
    check_keys(spec, {"beta"}, false);
    const double beta = spec.get("beta", 0.5);
    return make(SpectrumModel::fbm(beta), kernels_cov::fbm(beta), t_fbm(beta));
  }
  if (n == "ous" || n == "fous") {
    check_keys(spec, {"d", "a", "rho"}, false);
    const int d = as_int(spec.get("d", 2.0), n + ": d");
    const auto a = spec.get_list("a", static_cast<std::size_t>(d), 1.0);
    const double rho = n == "ous" ? 1.0 : spec.get("rho", 0.5);
    if (n == "ous" && spec.params.count("rho")) fail(Errc::invalid_argument, "ous: rho is fixed at 1 (use fous)");
    std::vector<SpectrumModel> factors;
    std::vector<CovarianceKernel> kernels;
    for (double aj : a) {
      factors.push_back(SpectrumModel::fou(aj, rho));
      kernels.push_back(kernels_cov::fou(aj, rho));
    }
    auto t = n == "ous" ? t_ous(a, d) : t_fous(a, rho, d);
    return make(SpectrumModel::tensor_sheet(factors, n), kernels_cov::sheet(kernels), t);
  }
  if (n == "fbs") {
    check_keys(spec, {"d", "beta"}, false);
    const int d = as_int(spec.get("d", 2.0), "fbs: d");
    const double beta = spec.get("beta", 0.5);
    std::vector<SpectrumModel> factors(static_cast<std::size_t>(d), SpectrumModel::fbm(beta));
    std::vector<CovarianceKernel> kernels(static_cast<std::size_t>(d), kernels_cov::fbm(beta));
    return make(SpectrumModel::tensor_sheet(factors, n), kernels_cov::sheet(kernels), t_fbs(beta, d));
  }
  if (n == "bs" || n == "tbs") {
    check_keys(spec, {"d"}, false);
    const int d = as_int(spec.get("d", 2.0), n + ": d");
    const bool tugged = n == "tbs";
    std::vector<SpectrumModel> factors(static_cast<std::size_t>(d),
                                       tugged ? SpectrumModel::brownian_bridge() : SpectrumModel::exact_bm());
    std::vector<CovarianceKernel> kernels(static_cast<std::size_t>(d),
                                          tugged ? kernels_cov::brownian_bridge() : kernels_cov::brownian_motion());
    return make(SpectrumModel::tensor_sheet(factors, n), kernels_cov::sheet(kernels), t_bs(d));
  }
  if (n == "rv") {
    check_keys(spec, {"c", "b", "a"}, false);
    return make(SpectrumModel::regular_varying(spec.get("c", 1.0), spec.get("b", 2.0), spec.get("a", 0.0)), std::nullopt,
                std::nullopt);
  }
  if (n == "explicit") {
    check_keys(spec, {}, true);
    if (spec.positional.empty()) fail(Errc::invalid_argument, "explicit: list the eigenvalues, e.g. explicit:4,1");
    return make(SpectrumModel::explicit_list(spec.positional), std::nullopt, std::nullopt);
  }
  fail(Errc::unknown_process, "unknown process '" + n + "'");
}

ProcessConstant process_constant(const Process& process) {
  const Asymptotic as = process.model.asymptotic();
  ProcessConstant out;
  out.derived = sharp_constant(as.c, as.b, as.a);
  out.transcribed = process.transcribed;
  if (out.transcribed) out.relative_gap = std::abs(out.transcribed->k / out.derived.k_sharp - 1.0);
  return out;
}

}  // namespace fq
