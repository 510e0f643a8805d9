#pragma once

// Named Gaussian processes: spectrum model, covariance kernel and the
// hand-written closed-form error constant where one is known.
//
// Process syntax: name[:key=value,...]. Per-factor lists use '/' as the
// separator (ous:d=2,a=1/2); explicit lists are positional (explicit:4,1).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fq/asymptotics.hpp"
#include "fq/spectra.hpp"

namespace fq {

struct ProcessSpec {
  std::string name;
  std::map<std::string, std::vector<double>> params;
  std::vector<double> positional;

  double get(const std::string& key, double fallback) const;
  std::vector<double> get_list(const std::string& key, std::size_t count, double fallback) const;
  std::string canonical() const;
};

ProcessSpec parse_process(const std::string& text);

/// Closed-form e_n ~ k (log n)^{log_exponent} (log log n)^{loglog_exponent}.
struct Transcription {
  double k = 0.0;
  double log_exponent = 0.0;
  double loglog_exponent = 0.0;
};

struct Process {
  ProcessSpec spec;
  SpectrumModel model;
  std::optional<CovarianceKernel> kernel;
  std::optional<Transcription> transcribed;
};

/// Throws Errc::unknown_process for names outside the catalog.
Process make_process(const ProcessSpec& spec);
inline Process make_process(const std::string& text) { return make_process(parse_process(text)); }

const std::vector<std::string>& catalog_names();

struct ProcessConstant {
  SharpLaw derived;  ///< from the spectrum asymptotics
  std::optional<Transcription> transcribed;
  double relative_gap = 0.0;  ///< |k_transcribed / k_derived - 1|, 0 without a transcription
};

ProcessConstant process_constant(const Process& process);

}  // namespace fq
