#include "robust/experiment.hpp"

#include "robust/ar.hpp"
#include "robust/crr.hpp"
#include "robust/datagen.hpp"
#include "robust/diagnostics.hpp"
#include "robust/error.hpp"
#include "robust/io.hpp"
#include "robust/linalg.hpp"
#include "robust/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace robust {

const char* to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::Regression: return "regression";
    case ProblemKind::ArAdditive: return "ar_additive";
    case ProblemKind::ArInnovational: return "ar_innovational";
  }
  return "regression";
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::N: return "n";
    case SweepAxis::D: return "d";
    case SweepAxis::Sigma: return "sigma";
    case SweepAxis::KStar: return "k_star";
  }
  return "n";
}

ProblemKind problem_kind_from_string(const std::string& s) {
  if (s == "regression") return ProblemKind::Regression;
  if (s == "ar_additive" || s == "additive") return ProblemKind::ArAdditive;
  if (s == "ar_innovational" || s == "innovational") return ProblemKind::ArInnovational;
  throw Error(ErrorCode::InvalidArgs, "unknown problem '" + s + "'");
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "n") return SweepAxis::N;
  if (s == "d") return SweepAxis::D;
  if (s == "sigma") return SweepAxis::Sigma;
  if (s == "k_star" || s == "kstar") return SweepAxis::KStar;
  throw Error(ErrorCode::InvalidArgs, "unknown sweep axis '" + s + "'");
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  if (name == "fig1a") {
    c.problem = ProblemKind::Regression;
    c.sweep = SweepAxis::N;
    c.values = {1000, 2000, 4000, 8000, 16000};
    c.d = 10;
    c.sigma = 1.0;
    c.k_star_frac = 0.02;
    c.k_mult = 2.0;
    c.trials = 20;
    c.methods = {"crr", "ols"};
    return c;
  }
  if (name == "fig2a") {
    c.problem = ProblemKind::ArAdditive;
    c.sweep = SweepAxis::N;
    c.values = {1000, 2000, 4000, 8000};
    c.d = 5;
    c.sigma = 1.0;
    c.k_star_frac = 1.0 / 200.0;
    c.k_mult = 2.0;
    c.trials = 50;
    c.methods = {"crtse", "crr", "ols"};
    return c;
  }
  throw Error(ErrorCode::InvalidArgs, "unknown preset '" + name + "' (fig1a, fig2a)");
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  try {
    if (j.contains("preset")) c = preset_config(j.at("preset").get<std::string>());
    if (j.contains("problem")) c.problem = problem_kind_from_string(j.at("problem").get<std::string>());
    if (j.contains("sweep")) c.sweep = sweep_axis_from_string(j.at("sweep").get<std::string>());
    if (j.contains("values")) c.values = j.at("values").get<std::vector<double>>();
    if (j.contains("n")) c.n = j.at("n").get<Index>();
    if (j.contains("d")) c.d = j.at("d").get<Index>();
    if (j.contains("sigma")) c.sigma = j.at("sigma").get<double>();
    if (j.contains("k_star")) c.k_star = j.at("k_star").get<Index>();
    if (j.contains("k_star_frac")) c.k_star_frac = j.at("k_star_frac").get<double>();
    if (j.contains("k_mult")) c.k_mult = j.at("k_mult").get<double>();
    if (j.contains("k")) c.k_fixed = j.at("k").get<Index>();
    if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("seed")) c.base_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) c.out_path = j.at("out").get<std::string>();
    if (j.contains("low")) c.corruption_low = j.at("low").get<double>();
    if (j.contains("high")) c.corruption_high = j.at("high").get<double>();
    if (j.contains("symmetric")) c.symmetric = j.at("symmetric").get<bool>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("experiment config: ") + e.what());
  }
  return c;
}

namespace {

struct CellParams {
  Index n = 0;
  Index d = 0;
  double sigma = 0.0;
  Index k_star = 0;
};

CellParams params_for(const ExperimentConfig& cfg, double value) {
  CellParams p{cfg.n, cfg.d, cfg.sigma, 0};
  switch (cfg.sweep) {
    case SweepAxis::N: p.n = static_cast<Index>(std::llround(value)); break;
    case SweepAxis::D: p.d = static_cast<Index>(std::llround(value)); break;
    case SweepAxis::Sigma: p.sigma = value; break;
    case SweepAxis::KStar: p.k_star = static_cast<Index>(std::llround(value)); break;
  }
  if (cfg.sweep != SweepAxis::KStar) {
    if (cfg.k_star) {
      p.k_star = *cfg.k_star;
    } else if (cfg.k_star_frac) {
      p.k_star = static_cast<Index>(std::floor(*cfg.k_star_frac * static_cast<double>(p.n) + 1e-9));
    }
  }
  return p;
}

bool is_ar(ProblemKind p) { return p != ProblemKind::Regression; }

Index method_k(const ExperimentConfig& cfg, const std::string& method, const CellParams& p) {
  if (method == "ols") return 0;
  if (cfg.k_fixed) return *cfg.k_fixed;
  Index k = static_cast<Index>(std::floor(cfg.k_mult * static_cast<double>(p.k_star) + 1e-9));
  const bool pointwise = method == "crr" || method == "oracle";
  if (pointwise && cfg.problem == ProblemKind::ArAdditive) k *= p.d;
  return k;
}

const std::vector<std::string> kKnownMethods{"crr", "crtse", "ioard", "ols", "oracle"};

struct CellData {
  std::optional<RegressionProblem> reg;
  std::optional<TimeSeriesRecord> series;
  VectorXd w_star;
};

CellData generate(const ExperimentConfig& cfg, const CellParams& p, std::uint64_t seed) {
  CorruptionPlan plan;
  plan.k_star = p.k_star;
  plan.low = cfg.corruption_low;
  plan.high = cfg.corruption_high;
  plan.sign = cfg.symmetric ? CorruptionSign::Symmetric : CorruptionSign::Positive;
  plan.seed = seed;
  CellData data;
  switch (cfg.problem) {
    case ProblemKind::Regression:
      data.reg = gen_regression(p.n, p.d, p.sigma, plan, seed);
      data.w_star = data.reg->truth->w_star;
      break;
    case ProblemKind::ArAdditive:
      data.series = inject_additive(gen_ar_series(p.n, p.d, p.sigma, seed), plan);
      data.w_star = data.series->truth->w_star;
      break;
    case ProblemKind::ArInnovational:
      data.series = gen_ar_series_io(p.n, p.d, p.sigma, plan, seed);
      data.w_star = data.series->truth->w_star;
      break;
  }
  return data;
}

RegressionProblem as_regression(const CellData& data) {
  if (data.reg) return *data.reg;
  const LaggedDesign design = build_lagged_design(*data.series);
  RegressionProblem p;
  p.X = design.X;
  p.y = design.y;
  return p;
}

Estimate run_method(const ExperimentConfig& cfg, const std::string& method, const CellData& data, Index k) {
  SolverConfig sc;
  sc.k = k;
  sc.tol = cfg.tol;
  sc.max_iters = cfg.max_iters;
  sc.clip = cfg.clip;
  if (method == "crtse") return solve_crtse(*data.series, sc);
  if (method == "ioard") return solve_ioard(*data.series, sc);
  const RegressionProblem problem = as_regression(data);
  if (method == "crr") return solve_crr(problem, sc);
  if (method == "oracle") {
    const TrimmedLsResult r = oracle_trimmed_ls(problem.X, problem.y, k);
    Estimate e;
    e.w = r.w;
    e.b = r.b;
    e.objective = r.objective;
    e.iters = 1;
    e.termination = Termination::Converged;
    return e;
  }
  Estimate e;  // ols
  e.w = ols(problem.X, problem.y);
  e.b = VectorXd::Zero(problem.n());
  e.iters = 0;
  e.termination = Termination::Converged;
  return e;
}

int resolve_threads(int requested) {
  int threads = requested > 0 ? requested : omp_get_max_threads();
  if (const char* env = std::getenv("ROBUST_ESTIM_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) threads = std::min(threads, cap);
  }
  return std::max(threads, 1);
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.values.empty()) throw Error(ErrorCode::InvalidArgs, "sweep list is empty");
  for (std::size_t i = 1; i < cfg.values.size(); ++i) {
    if (!(cfg.values[i] > cfg.values[i - 1])) {
      throw Error(ErrorCode::InvalidArgs, "sweep values must be strictly increasing");
    }
  }
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidArgs, "trials must be >= 1");
  if (cfg.methods.empty()) throw Error(ErrorCode::InvalidArgs, "no methods");
  for (const auto& m : cfg.methods) {
    if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) == kKnownMethods.end()) {
      throw Error(ErrorCode::InvalidArgs, "unknown method '" + m + "'");
    }
    if ((m == "crtse" || m == "ioard") && !is_ar(cfg.problem)) {
      throw Error(ErrorCode::InvalidArgs, "method '" + m + "' needs a time-series problem");
    }
  }
  for (double v : cfg.values) {
    const CellParams p = params_for(cfg, v);
    if (p.n < 1 || p.d < 1 || p.sigma < 0.0 || p.k_star < 0 || p.k_star > p.n) {
      throw Error(ErrorCode::InvalidArgs, "sweep value " + io::format_double(v) + " gives an invalid cell");
    }
    if (std::find(cfg.methods.begin(), cfg.methods.end(), "oracle") != cfg.methods.end()) {
      const Index k = method_k(cfg, "oracle", p);
      if (kernels::binomial(static_cast<std::uint64_t>(p.n), static_cast<std::uint64_t>(k)) > kEnumerationLimit) {
        throw Error(ErrorCode::TooLarge, "oracle cell C(" + std::to_string(p.n) + ", " + std::to_string(k) +
                                             ") exceeds the enumeration limit");
      }
    }
  }
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t sweep_index, int trial) {
  const std::uint64_t cell = (static_cast<std::uint64_t>(sweep_index) << 32) | static_cast<std::uint32_t>(trial);
  return base_seed ^ splitmix64_mix(cell);
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg, int threads) {
  validate(cfg);
  const auto sweeps = static_cast<std::int64_t>(cfg.values.size());
  const std::int64_t cells = sweeps * cfg.trials;
  std::vector<std::vector<ExperimentRow>> per_cell(static_cast<std::size_t>(cells));

#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(threads))
  for (std::int64_t c = 0; c < cells; ++c) {
    const auto si = static_cast<std::size_t>(c / cfg.trials);
    const int trial = static_cast<int>(c % cfg.trials);
    const double value = cfg.values[si];
    const CellParams p = params_for(cfg, value);
    const std::uint64_t seed = cell_seed(cfg.base_seed, si, trial);

    std::optional<CellData> data;
    std::string gen_error;
    try {
      data = generate(cfg, p, seed);
    } catch (const std::exception& e) {
      gen_error = e.what();
    }
    auto& rows = per_cell[static_cast<std::size_t>(c)];
    for (const auto& method : cfg.methods) {
      ExperimentRow row;
      row.sweep_param = to_string(cfg.sweep);
      row.sweep_value = value;
      row.trial = trial;
      row.method = method;
      row.n = p.n;
      row.d = p.d;
      row.k = method_k(cfg, method, p);
      row.k_star = p.k_star;
      row.sigma = p.sigma;
      row.seed = seed;
      row.err_l2 = std::numeric_limits<double>::quiet_NaN();
      row.termination = "Failed";
      if (data) {
        try {
          const auto start = std::chrono::steady_clock::now();
          const Estimate est = run_method(cfg, method, *data, row.k);
          const auto stop = std::chrono::steady_clock::now();
          row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
          row.err_l2 = (est.w - data->w_star).norm();
          row.iters = est.iters;
          row.termination = to_string(est.termination);
        } catch (const std::exception&) {
          // recorded as a Failed row
        }
      }
      rows.push_back(std::move(row));
    }
  }

  std::vector<ExperimentRow> all;
  all.reserve(static_cast<std::size_t>(cells) * cfg.methods.size());
  for (auto& rows : per_cell) {
    for (auto& r : rows) all.push_back(std::move(r));
  }
  std::stable_sort(all.begin(), all.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
    return std::tie(a.sweep_value, a.trial, a.method) < std::tie(b.sweep_value, b.trial, b.method);
  });
  return all;
}

void write_experiment_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  os << kExperimentHeader << '\n';
  for (const auto& r : rows) {
    os << r.sweep_param << ',' << io::format_double(r.sweep_value) << ',' << r.trial << ',' << r.method << ','
       << r.n << ',' << r.d << ',' << r.k << ',' << r.k_star << ',' << io::format_double(r.sigma) << ','
       << io::format_double(r.err_l2) << ',' << r.iters << ',' << r.termination << ','
       << io::format_double(r.wall_ms) << ',' << r.seed << '\n';
  }
}

std::vector<ExperimentRow> read_experiment_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::ParseError, "empty experiment CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kExperimentHeader) throw Error(ErrorCode::ParseError, "unexpected experiment CSV header");
  std::vector<ExperimentRow> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = io::split_csv_line(line);
    if (f.size() != 14) throw Error(ErrorCode::ParseError, "experiment row needs 14 fields");
    ExperimentRow r;
    r.sweep_param = f[0];
    r.sweep_value = io::parse_double(f[1]);
    r.trial = static_cast<int>(io::parse_int(f[2]));
    r.method = f[3];
    r.n = io::parse_int(f[4]);
    r.d = io::parse_int(f[5]);
    r.k = io::parse_int(f[6]);
    r.k_star = io::parse_int(f[7]);
    r.sigma = io::parse_double(f[8]);
    r.err_l2 = f[9].empty() ? std::numeric_limits<double>::quiet_NaN() : io::parse_double(f[9]);
    r.iters = static_cast<int>(io::parse_int(f[10]));
    r.termination = f[11];
    r.wall_ms = io::parse_double(f[12]);
    std::uint64_t seed = 0;
    std::istringstream(f[13]) >> seed;
    r.seed = seed;
    rows.push_back(std::move(r));
  }
  return rows;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<MethodCurve> median_curves(const std::vector<ExperimentRow>& rows) {
  std::map<std::string, std::map<double, std::vector<double>>> grouped;
  for (const auto& r : rows) {
    if (std::isnan(r.err_l2)) continue;
    grouped[r.method][r.sweep_value].push_back(r.err_l2);
  }
  if (grouped.empty()) throw Error(ErrorCode::ParseError, "no successful data rows to plot");
  std::vector<MethodCurve> out;
  for (auto& [method, by_x] : grouped) {
    MethodCurve c;
    c.method = method;
    for (auto& [x, errs] : by_x) {
      c.x.push_back(x);
      c.median_err.push_back(median(errs));
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::string render_svg(const std::vector<MethodCurve>& curves, bool loglog, const std::string& title) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
  auto tx = [loglog](double v) { return loglog ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (loglog && (c.x[i] <= 0 || c.median_err[i] <= 0)) continue;
      x0 = std::min(x0, tx(c.x[i]));
      x1 = std::max(x1, tx(c.x[i]));
      y0 = std::min(y0, tx(c.median_err[i]));
      y1 = std::max(y1, tx(c.median_err[i]));
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + ph - (tx(v) - y0) / (y1 - y0) * ph; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\"" << kTop + ph
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph
    << "\" stroke=\"black\"/>\n";
  auto label = [&](double v) { return io::format_double(loglog ? std::pow(10.0, v) : v).substr(0, 8); };
  s << "<text x=\"" << kLeft << "\" y=\"" << kH - 20 << "\" font-size=\"11\">" << label(x0) << "</text>\n";
  s << "<text x=\"" << kLeft + pw - 40 << "\" y=\"" << kH - 20 << "\" font-size=\"11\">" << label(x1)
    << "</text>\n";
  s << "<text x=\"5\" y=\"" << kTop + ph << "\" font-size=\"11\">" << label(y0) << "</text>\n";
  s << "<text x=\"5\" y=\"" << kTop + 10 << "\" font-size=\"11\">" << label(y1) << "</text>\n";
  s << "<text x=\"" << kLeft + pw / 2 - 60 << "\" y=\"" << kH - 5 << "\" font-size=\"12\">sweep value"
    << (loglog ? " (log)" : "") << "</text>\n";
  if (!title.empty()) {
    std::string esc;
    for (char ch : title) {
      if (ch == '<') esc += "&lt;";
      else if (ch == '>') esc += "&gt;";
      else if (ch == '&') esc += "&amp;";
      else esc += ch;
    }
    s << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">" << esc << "</text>\n";
  }
  for (std::size_t m = 0; m < curves.size(); ++m) {
    const char* color = kColors[m % std::size(kColors)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < curves[m].x.size(); ++i) {
      if (loglog && (curves[m].x[i] <= 0 || curves[m].median_err[i] <= 0)) continue;
      s << px(curves[m].x[i]) << ',' << py(curves[m].median_err[i]) << ' ';
    }
    s << "\"/>\n";
    s << "<text x=\"" << kLeft + pw + 10 << "\" y=\"" << kTop + 20 + 18 * static_cast<double>(m)
      << "\" font-size=\"12\" fill=\"" << color << "\">" << curves[m].method << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace robust
