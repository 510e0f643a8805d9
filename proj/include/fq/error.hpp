#pragma once

#include <stdexcept>
#include <string>

namespace fq {

enum class Errc {
  invalid_argument,   // parameter outside its domain
  unknown_process,
  malformed_grid,
  bias_budget,        // truncation cannot meet the requested bias bound
  non_convergence,
  rare_event,         // Monte Carlo hit count too small to estimate
  not_materializable, // budget too large to build an explicit codebook
  internal,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(Errc::invalid_argument, what);
}

}  // namespace fq
