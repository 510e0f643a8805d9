#include "fq/error.hpp"

namespace fq {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::unknown_process: return "unknown_process";
    case Errc::malformed_grid: return "malformed_grid";
    case Errc::bias_budget: return "bias_budget";
    case Errc::non_convergence: return "non_convergence";
    case Errc::rare_event: return "rare_event";
    case Errc::not_materializable: return "not_materializable";
    case Errc::internal: return "internal";
  }
  return "unknown";
}

}  // namespace fq
