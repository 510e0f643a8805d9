#include "fq/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fq/allocation.hpp"
#include "fq/asymptotics.hpp"
#include "fq/catalog.hpp"
#include "fq/error.hpp"
#include "fq/kernels.hpp"
#include "fq/montecarlo.hpp"
#include "fq/rate_distortion.hpp"
#include "fq/scalar_quantizer.hpp"
#include "fq/spectra.hpp"
#include "fq/vector_quantizer.hpp"

#ifndef FQ_VERSION
#define FQ_VERSION "dev"
#endif

namespace fq::cli {

namespace {

using json = nlohmann::ordered_json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kSchemaVersion = 1;  // bump when a column or key changes meaning

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Common {
  std::string format;
  std::string output;
  std::uint64_t seed = 1;
};

struct Meta {
  std::string command;
  std::string process;
  std::vector<std::pair<std::string, std::string>> fields;
};

class Sink {
 public:
  Sink(const Common& common, std::ostream& fallback) {
    if (!common.output.empty()) {
      file_ = std::make_unique<std::ofstream>(common.output);
      if (!*file_) fail(Errc::invalid_argument, "cannot open output file " + common.output);
    }
    os_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& os() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

json meta_json(const Meta& meta, const Common& common) {
  json m;
  m["tool"] = "fq";
  m["version"] = FQ_VERSION;
  m["command"] = meta.command;
  m["schema"] = kSchemaVersion;
  if (!meta.process.empty()) m["process"] = meta.process;
  m["seed"] = common.seed;
  for (const auto& [k, v] : meta.fields) m[k] = v;
  return m;
}

using Row = std::vector<std::string>;

void emit_table(const Common& common, std::ostream& fallback, const Meta& meta, const Row& header,
                const std::vector<Row>& rows) {
  Sink sink(common, fallback);
  auto& os = sink.os();
  if (common.format == "json") {
    json doc;
    doc["meta"] = meta_json(meta, common);
    doc["columns"] = header;
    json arr = json::array();
    for (const auto& r : rows) {
      json jr = json::array();
      for (const auto& cell : r) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell == "nan" || cell.empty()) {
          jr.push_back(nullptr);
        } else if (end != nullptr && *end == '\0') {
          jr.push_back(v);
        } else {
          jr.push_back(cell);
        }
      }
      arr.push_back(jr);
    }
    doc["rows"] = arr;
    os << doc.dump(2) << "\n";
    return;
  }
  os << "# tool: fq " << FQ_VERSION << "\n";
  os << "# command: " << meta.command << "\n";
  os << "# schema: " << kSchemaVersion << "\n";
  if (!meta.process.empty()) os << "# process: " << meta.process << "\n";
  os << "# seed: " << common.seed << "\n";
  for (const auto& [k, v] : meta.fields) os << "# " << k << ": " << v << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
}

void emit_object(const Common& common, std::ostream& fallback, const Meta& meta, json body) {
  if (common.format == "csv") fail(Errc::invalid_argument, meta.command + " emits JSON only");
  json doc;
  doc["meta"] = meta_json(meta, common);
  for (auto& [k, v] : body.items()) doc[k] = v;
  Sink sink(common, fallback);
  sink.os() << doc.dump(2) << "\n";
}

void add_model_fields(Meta& meta, const Process& p) {
  meta.process = p.spec.canonical();
  for (const auto& [k, v] : p.model.params()) meta.fields.emplace_back("param." + k, fmt(v));
  meta.fields.emplace_back("spectrum", to_string(p.model.tag()));
  if (p.model.has_asymptotic()) {
    const Asymptotic as = p.model.asymptotic();
    meta.fields.emplace_back("asymptotic_c", fmt(as.c));
    meta.fields.emplace_back("asymptotic_b", fmt(as.b));
    meta.fields.emplace_back("asymptotic_a", fmt(as.a));
  }
}

double budget_log(double log_n, std::uint64_t n) {
  if (n > 0) return std::log(static_cast<double>(n));
  return log_n;
}

// Commands.

struct ScalarArgs {
  std::size_t levels = 0;
  std::size_t scan = 0;
};

void cmd_scalar(const ScalarArgs& a, const Common& common, std::ostream& out) {
  Meta meta{"scalar", "", {{"law", "N(0,1)"}}};
  if ((a.levels == 0) == (a.scan == 0)) fail(Errc::invalid_argument, "scalar: give exactly one of --levels or --scan");
  if (a.levels > 0) {
    const auto q = ScalarQuantizerCache::global().quantizer(a.levels);
    json body;
    body["levels"] = q->levels;
    body["codepoints"] = q->codepoints;
    body["thresholds"] = q->thresholds;
    body["cell_mass"] = q->cell_mass;
    body["distortion"] = q->distortion;
    body["identity_distortion"] = q->identity_distortion();
    body["scaled_distortion"] = static_cast<double>(q->levels) * static_cast<double>(q->levels) * q->distortion;
    body["stationarity_residual"] = q->stationarity_residual;
    body["iterations"] = q->iterations;
    meta.fields.emplace_back("exactness", "exact");
    emit_object(common, out, meta, body);
    return;
  }
  std::vector<Row> rows;
  for (const auto& r : c1_scan(a.scan))
    rows.push_back({std::to_string(r.k), r.valid ? fmt(r.scaled) : "nan", fmt(r.running_sup), r.valid ? "1" : "0"});
  meta.fields.emplace_back("limit_sqrt3_pi_over_2", fmt(kScalarLimit));
  emit_table(common, out, meta, {"k", "k2_ek2", "running_sup", "valid"}, rows);
}

struct VqArgs {
  std::size_t dim = 2;
  std::size_t levels = 4;
  VqOptions opt;
};

void cmd_vq(const VqArgs& a, const Common& common, std::ostream& out) {
  const VectorQuantizer q = train_vq(a.dim, a.levels, common.seed, a.opt);
  Meta meta{"vq", "", {{"law", "N(0,I_d)"}, {"exactness", "approximate-upper"}, {"kernels", kernels::to_string(kernels::active())}}};
  json body;
  body["dim"] = q.dim;
  body["levels"] = q.levels;
  json cps = json::array();
  for (std::size_t c = 0; c < q.levels; ++c)
    cps.push_back(std::vector<double>(q.codepoints.begin() + c * q.dim, q.codepoints.begin() + (c + 1) * q.dim));
  body["codepoints"] = cps;
  body["distortion"] = {{"value", q.distortion_estimate.value},
                        {"std_error", q.distortion_estimate.std_error},
                        {"samples", q.distortion_estimate.samples},
                        {"seed", q.distortion_estimate.seed}};
  body["scaled_distortion"] = std::pow(static_cast<double>(q.levels), 2.0 / static_cast<double>(q.dim)) * q.distortion_estimate.value;
  body["dead_cell_reseeds"] = q.dead_cell_reseeds;
  body["dead_cell_flag"] = q.dead_cell_flag;
  body["best_restart"] = q.best_restart;
  emit_object(common, out, meta, body);
}

struct EigsArgs {
  std::string process;
  std::size_t count = 10;
  std::string method = "exact";
  std::size_t grid = 500;
};

void cmd_eigs(const EigsArgs& a, const Common& common, std::ostream& out) {
  const Process p = make_process(a.process);
  Meta meta{"eigs", "", {}};
  add_model_fields(meta, p);
  std::vector<double> values;
  std::string tag;
  if (a.count > p.model.support()) meta.fields.emplace_back("rows_limited_to_support", std::to_string(p.model.support()));
  if (a.method == "exact") {
    if (p.model.tag() != EigenTag::exact)
      fail(Errc::invalid_argument, "eigs: no exact eigenvalues for " + p.spec.name + " (use asymptotic or nystrom)");
    values = p.model.eigenvalues(std::min(a.count, p.model.support()));
    tag = "exact";
  } else if (a.method == "asymptotic") {
    if (p.model.tag() == EigenTag::exact && p.model.has_asymptotic()) {
      const Asymptotic as = p.model.asymptotic();
      values = SpectrumModel::regular_varying(as.c, as.b, as.a).eigenvalues(a.count);
    } else {
      values = p.model.eigenvalues(std::min(a.count, p.model.support()));
    }
    tag = "asymptotic";
  } else if (a.method == "nystrom") {
    if (!p.kernel) fail(Errc::invalid_argument, "eigs: no covariance kernel for " + p.spec.name);
    const NystromResult r = nystrom_eigs(*p.kernel, a.grid);
    values.assign(r.eigenvalues.begin(), r.eigenvalues.begin() + static_cast<std::ptrdiff_t>(std::min(a.count, r.eigenvalues.size())));
    tag = "nystrom";
    meta.fields.emplace_back("grid", std::to_string(a.grid));
    meta.fields.emplace_back("nodes", std::to_string(r.nodes));
    meta.fields.emplace_back("matrix_trace", fmt(r.matrix_trace));
    meta.fields.emplace_back("kernel_trace", fmt(p.kernel->diagonal_integral));
  } else {
    fail(Errc::invalid_argument, "eigs: method must be exact, asymptotic or nystrom");
  }
  meta.fields.emplace_back("method", tag);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < values.size(); ++i) rows.push_back({std::to_string(i + 1), fmt(values[i]), tag});
  emit_table(common, out, meta, {"index", "eigenvalue", "method"}, rows);
}

struct DesignArgs {
  std::string process;
  double log_n = kNaN;
  std::uint64_t n = 0;
  std::size_t block_dim = 1;
  double cd = 0.0;
  bool materialize = false;
  std::size_t vq_eval = 200000;
};

void cmd_design(const DesignArgs& a, const Common& common, std::ostream& out) {
  const Process p = make_process(a.process);
  const double log_n = budget_log(a.log_n, a.n);
  const ProductPlan plan = allocate(p.model, log_n, a.block_dim);
  Meta meta{"design", "", {}};
  add_model_fields(meta, p);
  meta.fields.emplace_back("exactness", a.block_dim == 1 ? "exact" : "approximate-upper");

  json body;
  body["log_n"] = log_n;
  if (a.n > 0) body["n"] = a.n;
  body["block_dim"] = a.block_dim;
  body["m"] = plan.m;
  body["materializable"] = plan.materializable;
  if (plan.materializable) body["levels"] = plan.levels;
  body["log_levels"] = plan.log_levels;
  body["log_levels_sum"] = plan.log_levels_sum();
  body["block_eigs"] = plan.block_eigs;

  const bool buildable = plan.materializable &&
                         *std::max_element(plan.levels.begin(), plan.levels.end()) <= kDeskScaleLevels;
  if (buildable) {
    PlanDistortionOptions opt;
    opt.seed = common.seed;
    opt.vq_eval_samples = a.vq_eval;
    const PlanDistortion d = plan_distortion(plan, p.model, opt);
    body["distortion"] = {{"tail", d.tail}, {"quant", d.quant}, {"total", d.total},
                          {"std_error", d.std_error}, {"exact", d.exact}};
  } else {
    body["distortion"] = nullptr;
    body["distortion_note"] = "levels beyond desk scale; only the bounds are reported";
  }

  const double cd = a.cd > 0.0 ? a.cd : (a.block_dim == 1 ? kScalarLimit : 0.0);
  json bounds;
  if (cd > 0.0) {
    bounds["upper"] = product_upper_bound(p.model, log_n, a.block_dim, cd);
    bounds["cd"] = cd;
    bounds["cd_source"] = a.cd > 0.0 ? "user" : "sqrt(3)pi/2 (empirical sup)";
  } else {
    bounds["upper"] = nullptr;
    bounds["cd_note"] = "pass --cd for block dimensions above 1";
  }
  bounds["lower"] = spectral_lower_bound(p.model, log_n);
  body["bounds"] = bounds;

  if (a.materialize) {
    if (a.block_dim != 1 || !plan.materializable ||
        *std::max_element(plan.levels.begin(), plan.levels.end()) > ScalarQuantizerCache::global().full_limit())
      fail(Errc::not_materializable, "design: codebooks are materialised only for d = 1 and levels <= " +
                                         std::to_string(ScalarQuantizerCache::global().full_limit()));
    json books = json::array();
    for (std::size_t j = 0; j < plan.m; ++j) {
      const auto q = ScalarQuantizerCache::global().quantizer(plan.levels[j]);
      json b;
      b["block"] = j + 1;
      b["scale"] = std::sqrt(plan.block_eigs[j]);
      b["codepoints"] = q->codepoints;
      books.push_back(b);
    }
    body["codebooks"] = books;
  }
  emit_object(common, out, meta, body);
}

struct RdArgs {
  std::string process;
  std::string eps_grid;
  bool invert = false;
  double rate = kNaN;
};

void cmd_rd(const RdArgs& a, const Common& common, std::ostream& out) {
  const Process p = make_process(a.process);
  Meta meta{"rd", "", {}};
  add_model_fields(meta, p);
  if (a.invert) {
    if (!std::isfinite(a.rate)) fail(Errc::invalid_argument, "rd --invert needs --rate");
    const double eps = distortion_rate(p.model, a.rate);
    const WaterfillSolution w = waterfill(p.model, eps);
    json body;
    body["rate"] = a.rate;
    body["eps"] = eps;
    body["r"] = w.r;
    body["theta"] = w.theta;
    body["R_check"] = w.R;
    emit_object(common, out, meta, body);
    return;
  }
  if (a.eps_grid.empty()) fail(Errc::invalid_argument, "rd: give --eps-grid or --invert --rate");
  const auto grid = parse_grid(a.eps_grid);
  std::vector<Row> rows;
  for (const GridValue& g : grid) {
    const WaterfillSolution w = g.square ? waterfill_sq(p.model, *g.square) : waterfill(p.model, g.value);
    double asym = kNaN;
    if (p.model.has_asymptotic()) {
      const Asymptotic as = p.model.asymptotic();
      if (as.b > 1.0 && (as.a == 0.0 || g.value < 1.0)) asym = rd_asymptotic(as.c, as.b, as.a, g.value);
    }
    const double ratio = std::isfinite(asym) && w.R > 0.0 ? w.R / asym : kNaN;
    rows.push_back({fmt(g.value), std::to_string(w.r), fmt(w.theta), fmt(w.R), fmt(asym), fmt(ratio)});
  }
  meta.fields.emplace_back("zero_rate_rows", "r=0 marks eps >= e_1");
  emit_table(common, out, meta, {"eps", "r", "theta", "R", "R_asymptotic", "ratio"}, rows);
}

struct ConstantsArgs {
  std::string process;
};

void cmd_constants(const ConstantsArgs& a, const Common& common, std::ostream& out) {
  const Process p = make_process(a.process);
  Meta meta{"constants", "", {}};
  add_model_fields(meta, p);
  const ProcessConstant pc = process_constant(p);
  json body;
  body["K"] = pc.transcribed ? pc.transcribed->k : pc.derived.k_sharp;
  body["K_derived"] = pc.derived.k_sharp;
  if (pc.transcribed) {
    body["K_transcribed"] = pc.transcribed->k;
    body["relative_gap"] = pc.relative_gap;
  } else {
    body["K_transcribed"] = nullptr;
  }
  body["form"] = pc.derived.form == LawForm::index_b ? "index_b" : "index_minus_one";
  body["log_exponent"] = pc.derived.log_exponent;
  body["loglog_exponent"] = pc.derived.loglog_exponent;
  body["scalar_ratio_bound"] = pc.derived.scalar_ratio_bound;
  body["psi_constant"] = pc.derived.psi_constant();
  body["c"] = pc.derived.c;
  body["b"] = pc.derived.b;
  body["a"] = pc.derived.a;
  emit_object(common, out, meta, body);
}

struct CompareArgs {
  std::string process;
  std::string grid;
};

void cmd_compare(const CompareArgs& a, const Common& common, std::ostream& out) {
  const Process p = make_process(a.process);
  Meta meta{"compare", "", {}};
  add_model_fields(meta, p);
  meta.fields.emplace_back("slack", "asymptotic predictions carry no finite-n correction");
  std::optional<SharpLaw> law;
  if (p.model.has_asymptotic()) {
    const Asymptotic as = p.model.asymptotic();
    law = sharp_constant(as.c, as.b, as.a);
  }
  std::vector<Row> rows;
  for (const GridValue& g : parse_grid(a.grid)) {
    const double log_n = g.value;
    const ProductPlan plan = allocate(p.model, log_n, 1);
    const double pred = law && log_n > 1.0 ? std::pow(law->predicted(log_n), 2.0) : kNaN;
    const double lower = spectral_lower_bound(p.model, log_n);
    const double upper = product_upper_bound(p.model, log_n, 1, kScalarLimit);
    double planned = kNaN;
    if (plan.materializable && *std::max_element(plan.levels.begin(), plan.levels.end()) <= kDeskScaleLevels)
      planned = plan_distortion(plan, p.model).total;
    rows.push_back({fmt(log_n), std::to_string(plan.m), fmt(pred), fmt(lower), fmt(planned), fmt(upper),
                    fmt(lower / pred), fmt(planned / lower), fmt(upper / planned)});
  }
  emit_table(common, out, meta,
             {"log_n", "m", "predicted_en2", "lower", "plan", "upper", "lower_over_predicted", "plan_over_lower",
              "upper_over_plan"},
             rows);
}

struct McArgs {
  std::string process;
  double log_n = kNaN;
  std::uint64_t n = 0;
  std::size_t block_dim = 1;
  std::size_t truncation = 0;
  std::size_t samples = 0;
  double eps = kNaN;
};

void cmd_mc_distortion(const McArgs& a, const Common& common, std::ostream& out) {
  const Process p = make_process(a.process);
  const double log_n = budget_log(a.log_n, a.n);
  const ProductPlan plan = allocate(p.model, log_n, a.block_dim);
  const std::size_t J = a.truncation > 0 ? a.truncation : plan.m * a.block_dim;
  const std::size_t samples = a.samples > 0 ? a.samples : 1000000;
  const EstimateCI est = empirical_distortion(plan, p.model, J, samples, common.seed);
  Meta meta{"mc distortion", "", {}};
  add_model_fields(meta, p);
  json body;
  body["log_n"] = log_n;
  body["m"] = plan.m;
  body["levels"] = plan.levels;
  body["estimate"] = est.value;
  body["std_error"] = est.std_error;
  body["samples"] = est.samples;
  body["seed"] = est.seed;
  body["truncation"] = J;
  body["bias_bound"] = p.model.tail(J).bound;
  body["tail_added"] = p.model.tail_sum(J);
  if (a.block_dim == 1) {
    const double exact = plan_distortion(plan, p.model).total;
    body["analytic"] = exact;
    body["z_score"] = (est.value - exact) / est.std_error;
  }
  emit_object(common, out, meta, body);
}

void cmd_mc_smallball(const McArgs& a, const Common& common, std::ostream& out) {
  const Process p = make_process(a.process);
  if (!std::isfinite(a.eps)) fail(Errc::invalid_argument, "mc smallball needs --eps");
  const std::size_t J = a.truncation > 0 ? a.truncation : truncation_for_budget(p.model, 1e-3 * a.eps * a.eps);
  const std::size_t samples = a.samples > 0 ? a.samples : 20000;
  const SmallBallEstimate sb = small_ball(p.model, a.eps, J, samples, common.seed);
  const WaterfillSolution w = waterfill(p.model, a.eps);
  Meta meta{"mc smallball", "", {}};
  add_model_fields(meta, p);
  json body;
  body["eps"] = sb.eps;
  body["probability"] = sb.probability;
  body["F"] = sb.F;
  body["std_error"] = sb.std_error;
  body["hits"] = sb.hits;
  body["samples"] = sb.samples;
  body["seed"] = sb.seed;
  body["truncation"] = sb.truncation;
  body["truncation_bias"] = sb.truncation_bias;
  body["bias_direction"] = "truncation overestimates P, so F is underestimated";
  body["R"] = w.R;
  body["F_over_R"] = w.R > 0.0 ? num(sb.F / w.R) : json(nullptr);
  if (p.model.has_asymptotic() && p.model.asymptotic().b > 1.0) {
    const double b = p.model.asymptotic().b;
    body["lower_factor"] = std::pow(b / (b + 1.0), b / (b - 1.0));
  }
  emit_object(common, out, meta, body);
}

// Disk cache of scalar distortions, keyed by level count.

std::filesystem::path cache_file() {
  const char* dir = std::getenv("FQ_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return {};
  return std::filesystem::path(dir) / "scalar_distortions.json";
}

void load_cache(std::ostream& err) {
  const auto path = cache_file();
  if (path.empty() || !std::filesystem::exists(path)) return;
  try {
    std::ifstream in(path);
    const json doc = json::parse(in);
    for (const auto& [k, v] : doc.at("distortions").items())
      ScalarQuantizerCache::global().preload(std::stoull(k), v.get<double>());
  } catch (const std::exception& e) {
    err << "warning: ignoring unreadable cache " << path << ": " << e.what() << "\n";
  }
}

void save_cache(std::ostream& err) {
  const auto path = cache_file();
  if (path.empty()) return;
  try {
    std::filesystem::create_directories(path.parent_path());
    json doc;
    doc["version"] = FQ_VERSION;
    json d = json::object();
    for (const auto& [k, v] : ScalarQuantizerCache::global().distortions()) d[std::to_string(k)] = v;
    doc["distortions"] = d;
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream os(tmp);
      os << doc.dump() << "\n";
    }
    std::filesystem::rename(tmp, path);
  } catch (const std::exception& e) {
    err << "warning: could not write cache " << path << ": " << e.what() << "\n";
  }
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::unknown_process: return kUnknownProcess;
    case Errc::malformed_grid: return kMalformedGrid;
    case Errc::bias_budget: return kBiasBudget;
    case Errc::invalid_argument:
    case Errc::not_materializable: return kDomain;
    case Errc::non_convergence:
    case Errc::rare_event: return kNumerical;
    case Errc::internal: return kInternal;
  }
  return kInternal;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Product quantizers, bounds and rate-distortion for Gaussian processes", "fq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("fq ") + FQ_VERSION);

  Common common;
  std::string format_default;

  ScalarArgs scalar;
  auto* s_scalar = app.add_subcommand("scalar", "Optimal N(0,1) quantizers");
  s_scalar->add_option("--levels", scalar.levels, "Emit the k-level quantizer");
  s_scalar->add_option("--scan", scalar.scan, "Tabulate k^2 e_k^2 for k = 1..K");

  VqArgs vq;
  auto* s_vq = app.add_subcommand("vq", "Train a quantizer for N(0, I_d)");
  s_vq->add_option("--dim", vq.dim)->check(CLI::Range(1, 16));
  s_vq->add_option("--levels", vq.levels)->check(CLI::Range(1, 1 << 16));
  s_vq->add_option("--batch", vq.opt.batch);
  s_vq->add_option("--iterations", vq.opt.iterations);
  s_vq->add_option("--restarts", vq.opt.restarts);
  s_vq->add_option("--eval-samples", vq.opt.eval_samples);

  EigsArgs eigs;
  auto* s_eigs = app.add_subcommand("eigs", "Eigenvalues of a covariance operator");
  s_eigs->add_option("--process", eigs.process)->required();
  s_eigs->add_option("--count", eigs.count)->check(CLI::Range(1, 10000000));
  s_eigs->add_option("--method", eigs.method)->check(CLI::IsMember({"exact", "asymptotic", "nystrom"}));
  s_eigs->add_option("--grid", eigs.grid, "Nystrom points per axis");

  DesignArgs design;
  auto* s_design = app.add_subcommand("design", "Product quantizer plan, distortion and bounds");
  s_design->add_option("--process", design.process)->required();
  auto* o_logn = s_design->add_option("--log-n", design.log_n, "Codebook budget as log n (nats)");
  auto* o_n = s_design->add_option("--n", design.n, "Codebook budget n");
  o_logn->excludes(o_n);
  s_design->add_option("--block-dim", design.block_dim)->check(CLI::Range(1, 16));
  s_design->add_option("--cd", design.cd, "C(d) for the upper bound");
  s_design->add_flag("--materialize", design.materialize, "Include per-block codebooks");
  s_design->add_option("--vq-eval-samples", design.vq_eval);

  RdArgs rd;
  auto* s_rd = app.add_subcommand("rd", "Water-filling epsilon-entropy");
  s_rd->add_option("--process", rd.process)->required();
  s_rd->add_option("--eps-grid", rd.eps_grid, "eps values: x | a,b,c | sqrtX | start:stop:steps");
  s_rd->add_flag("--invert", rd.invert, "Solve R(eps) = rate for eps");
  s_rd->add_option("--rate", rd.rate, "Rate in nats for --invert");

  ConstantsArgs constants;
  auto* s_constants = app.add_subcommand("constants", "Sharp asymptotic constant of a process");
  s_constants->add_option("--process", constants.process)->required();

  CompareArgs compare;
  auto* s_compare = app.add_subcommand("compare", "Predicted e_n against the bound pair and the scalar plan");
  s_compare->add_option("--process", compare.process)->required();
  s_compare->add_option("--log-n-grid", compare.grid)->required();

  McArgs mc;
  auto* s_mc = app.add_subcommand("mc", "Monte Carlo estimators");
  s_mc->require_subcommand(1);
  auto* s_mcd = s_mc->add_subcommand("distortion", "Empirical distortion of a product plan");
  auto* s_mcs = s_mc->add_subcommand("smallball", "Small-ball function F(eps)");
  for (auto* sub : {s_mcd, s_mcs}) {
    sub->add_option("--process", mc.process)->required();
    sub->add_option("--truncation", mc.truncation, "KL coordinates drawn per path");
    sub->add_option("--samples", mc.samples);
  }
  auto* o_mlogn = s_mcd->add_option("--log-n", mc.log_n);
  auto* o_mn = s_mcd->add_option("--n", mc.n);
  o_mlogn->excludes(o_mn);
  s_mcd->add_option("--block-dim", mc.block_dim)->check(CLI::Range(1, 16));
  s_mcs->add_option("--eps", mc.eps)->required();

  for (auto* sub : {s_scalar, s_vq, s_eigs, s_design, s_rd, s_constants, s_compare, s_mcd, s_mcs}) {
    sub->add_option("--format", format_default, "Output format: json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output,-o", common.output, "Write to this file instead of stdout");
    sub->add_option("--seed", common.seed, "Random seed");
  }

  std::vector<std::string> argv_store{"fq"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto run_with_format = [&](const char* fallback, const std::function<void()>& body) {
    common.format = format_default.empty() ? fallback : format_default;
    body();
  };

  try {
    load_cache(err);
    if (s_scalar->parsed()) {
      run_with_format(scalar.scan > 0 ? "csv" : "json", [&] { cmd_scalar(scalar, common, out); });
    } else if (s_vq->parsed()) {
      run_with_format("json", [&] { cmd_vq(vq, common, out); });
    } else if (s_eigs->parsed()) {
      run_with_format("csv", [&] { cmd_eigs(eigs, common, out); });
    } else if (s_design->parsed()) {
      if (std::isnan(design.log_n) && design.n == 0) fail(Errc::invalid_argument, "design: give --log-n or --n");
      run_with_format("json", [&] { cmd_design(design, common, out); });
    } else if (s_rd->parsed()) {
      run_with_format(rd.invert ? "json" : "csv", [&] { cmd_rd(rd, common, out); });
    } else if (s_constants->parsed()) {
      run_with_format("json", [&] { cmd_constants(constants, common, out); });
    } else if (s_compare->parsed()) {
      run_with_format("csv", [&] { cmd_compare(compare, common, out); });
    } else if (s_mcd->parsed()) {
      if (std::isnan(mc.log_n) && mc.n == 0) fail(Errc::invalid_argument, "mc distortion: give --log-n or --n");
      run_with_format("json", [&] { cmd_mc_distortion(mc, common, out); });
    } else if (s_mcs->parsed()) {
      run_with_format("json", [&] { cmd_mc_smallball(mc, common, out); });
    }
    save_cache(err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}

}  // namespace fq::cli
