#include "robust/cli.hpp"

#include "robust/ar.hpp"
#include "robust/crr.hpp"
#include "robust/datagen.hpp"
#include "robust/diagnostics.hpp"
#include "robust/experiment.hpp"
#include "robust/io.hpp"
#include "robust/linalg.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

namespace robust {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
      return 3;
    case ErrorCode::RankDeficient:
    case ErrorCode::NonStationary:
      return 4;
    default:
      return 2;
  }
}

namespace {

constexpr const char* kSolveHeader = "method,n,d,k,k_star,sigma,err_l2,iters,termination,wall_ms,seed";

struct GenArgs {
  Index n = 1000;
  Index d = 5;
  double sigma = 1.0;
  Index k_star = 0;
  std::uint64_t seed = 1;
  std::string mode = "clean";
  double low = 10.0;
  double high = 20.0;
  bool symmetric = false;
  std::string out;
};

struct SolveArgs {
  std::string input;
  std::string method = "crr";
  std::string truth;
  std::optional<Index> k;
  bool header = false;
  std::string support_out;
  std::string clip = "auto";
  double tol = 1e-8;
  int max_iters = 500;
};

struct ExperimentArgs {
  std::string preset;
  std::string config;
  std::string problem, sweep, out;
  std::vector<double> values;
  std::vector<std::string> methods;
  std::optional<Index> n, d, k_star, k;
  std::optional<double> sigma, k_star_frac, k_mult;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

struct DiagArgs {
  std::string input;
  std::string truth;
  std::optional<Index> k;
  Index k_max = 0;
  Index group = 0;
  double tau = 1.0;
  double sigma = 1.0;
  double lambda_norm = 0.005;
  Index d = 3;
  double samples = 1e7;
  std::uint64_t seed = 1;
};

struct PlotArgs {
  std::string input;
  std::string out;
  bool loglog = false;
  std::string title;
};

CorruptionPlan make_plan(const GenArgs& a) {
  CorruptionPlan plan;
  plan.k_star = a.k_star;
  plan.low = a.low;
  plan.high = a.high;
  plan.sign = a.symmetric ? CorruptionSign::Symmetric : CorruptionSign::Positive;
  plan.seed = a.seed;
  return plan;
}

void cmd_gen_regression(const GenArgs& a, std::ostream& out) {
  const RegressionProblem p = gen_regression(a.n, a.d, a.sigma, make_plan(a), a.seed);
  const std::string prefix = a.out.empty() ? "regression" : a.out;
  io::write_regression_csv(fs::path(prefix + ".csv"), p);
  io::write_json(fs::path(prefix + ".truth.json"), io::regression_truth_json(*p.truth, a.n, a.d, a.seed));
  out << prefix << ".csv\n" << prefix << ".truth.json\n";
}

void cmd_gen_ar(const GenArgs& a, std::ostream& out) {
  const CorruptionMode mode = corruption_mode_from_string(a.mode);
  TimeSeriesRecord rec;
  switch (mode) {
    case CorruptionMode::Clean:
      if (a.k_star != 0) throw Error(ErrorCode::InvalidArgs, "--kstar needs --mode additive or innovational");
      rec = gen_ar_series(a.n, a.d, a.sigma, a.seed);
      break;
    case CorruptionMode::Additive:
      rec = inject_additive(gen_ar_series(a.n, a.d, a.sigma, a.seed), make_plan(a));
      break;
    case CorruptionMode::Innovational:
      rec = gen_ar_series_io(a.n, a.d, a.sigma, make_plan(a), a.seed);
      break;
  }
  const std::string prefix = a.out.empty() ? "series" : a.out;
  io::write_series(fs::path(prefix + ".series"), rec);
  io::write_json(fs::path(prefix + ".truth.json"), io::series_truth_json(*rec.truth, a.n, a.d, a.seed));
  out << prefix << ".series\n" << prefix << ".truth.json\n";
}

bool looks_like_series(const fs::path& path) {
  if (path.extension() == ".series") return true;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  std::string first;
  std::getline(in, first);
  return first.rfind("# d=", 0) == 0;
}

std::optional<nlohmann::json> load_truth(const fs::path& input, const std::string& explicit_path) {
  if (!explicit_path.empty()) return io::read_json(explicit_path);
  fs::path sidecar = input;
  sidecar.replace_extension(".truth.json");
  if (fs::exists(sidecar)) return io::read_json(sidecar);
  return std::nullopt;
}

ClipPolicy parse_clip(const std::string& s) {
  if (s == "auto") return ClipAutoMad{};
  if (s == "none") return ClipNone{};
  return ClipFixed{io::parse_double(s)};
}

std::string opt_int(const std::optional<Index>& v) { return v ? std::to_string(*v) : std::string(); }

void write_support(const std::string& path, const VectorXd& b) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  for (Index i = 0; i < b.size(); ++i) {
    if (b[i] != 0.0) f << i << '\n';
  }
}

void cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const fs::path input(a.input);
  if (!fs::exists(input)) throw Error(ErrorCode::IoError, "input '" + a.input + "' does not exist");
  const auto truth_json = load_truth(input, a.truth);

  SolverConfig sc;
  sc.k = a.k;
  sc.tol = a.tol;
  sc.max_iters = a.max_iters;
  sc.clip = parse_clip(a.clip);

  Estimate est;
  Index n = 0, d = 0;
  VectorXd w_star;
  std::optional<Index> k_star;
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
  if (truth_json) {
    if (truth_json->contains("seed")) seed = truth_json->at("seed").get<std::uint64_t>();
  }
  double wall_ms = 0.0;
  auto timed = [&wall_ms](auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto result = fn();
    wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
  };

  if (looks_like_series(input)) {
    TimeSeriesRecord rec = io::read_series(input);
    n = rec.n();
    d = rec.d;
    if (truth_json) {
      rec.truth = io::series_truth_from_json(*truth_json);
      w_star = rec.truth->w_star;
      k_star = rec.truth->k_star();
      sigma = rec.truth->sigma;
    }
    if (a.method == "crtse") {
      est = timed([&] { return solve_crtse(rec, sc); });
    } else if (a.method == "ioard") {
      est = timed([&] { return solve_ioard(rec, sc); });
    } else if (a.method == "ols") {
      est = timed([&] { return solve_ar_ols(rec); });
    } else if (a.method == "crr" || a.method == "oracle") {
      const LaggedDesign design = build_lagged_design(rec);
      Index k = 0;
      if (a.k) {
        k = *a.k;
      } else if (rec.truth) {
        // an additive outlier pollutes up to d + 1 rows, so give each one d slots
        const bool additive = rec.truth->mode == CorruptionMode::Additive;
        k = additive ? 2 * rec.truth->k_star() * d : rec.truth->k_star();
      } else {
        throw Error(ErrorCode::InvalidArgs, "--k is required without a truth sidecar");
      }
      if (a.method == "crr") {
        RegressionProblem p{design.X, design.y, std::nullopt};
        SolverConfig cfg = sc;
        cfg.k = k;
        est = timed([&] { return solve_crr(p, cfg); });
      } else {
        const TrimmedLsResult r = timed([&] { return oracle_trimmed_ls(design.X, design.y, k); });
        est.w = r.w;
        est.b = r.b;
        est.k = k;
        est.iters = 1;
        est.termination = Termination::Converged;
      }
    } else {
      throw Error(ErrorCode::InvalidArgs, "unknown method '" + a.method + "'");
    }
  } else {
    io::RegressionFile file = io::read_regression_csv(input);
    RegressionProblem& p = file.problem;
    n = p.n();
    d = p.d();
    if (truth_json) {
      p.truth = io::regression_truth_from_json(*truth_json, file);
      w_star = p.truth->w_star;
      k_star = p.truth->k_star();
      sigma = p.truth->sigma;
    }
    if (a.method == "crr") {
      est = timed([&] { return solve_crr(p, sc); });
    } else if (a.method == "ols") {
      est = timed([&] {
        Estimate e;
        e.w = ols(p.X, p.y);
        e.b = VectorXd::Zero(p.n());
        e.iters = 0;
        e.termination = Termination::Converged;
        return e;
      });
    } else if (a.method == "oracle") {
      const Index k = resolve_pointwise_k(sc, p.truth, p.n());
      const TrimmedLsResult r = timed([&] { return oracle_trimmed_ls(p.X, p.y, k); });
      est.w = r.w;
      est.b = r.b;
      est.k = k;
      est.objective = r.objective;
      est.iters = 1;
      est.termination = Termination::Converged;
    } else if (a.method == "crtse" || a.method == "ioard") {
      throw Error(ErrorCode::InvalidArgs, "method '" + a.method + "' needs a series input");
    } else {
      throw Error(ErrorCode::InvalidArgs, "unknown method '" + a.method + "'");
    }
  }

  if (w_star.size() > 0 && w_star.size() != est.w.size()) {
    throw Error(ErrorCode::ParseError, "truth sidecar w_star has the wrong length");
  }
  if (est.trimmed > 0) {
    err << "note: dropped " << est.trimmed << " leading responses so the order divides n\n";
  }
  if (!a.support_out.empty()) write_support(a.support_out, est.b);
  if (a.header) out << kSolveHeader << '\n';
  out << a.method << ',' << n << ',' << d << ',' << est.k << ',' << opt_int(k_star) << ','
      << (sigma ? io::format_double(*sigma) : "") << ','
      << (w_star.size() > 0 ? io::format_double((est.w - w_star).norm()) : "") << ',' << est.iters << ','
      << to_string(est.termination) << ',' << io::format_double(wall_ms) << ','
      << (seed ? std::to_string(*seed) : "") << '\n';
}

void cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
  ExperimentConfig cfg;
  if (!a.preset.empty()) cfg = preset_config(a.preset);
  if (!a.config.empty()) cfg = config_from_json(io::read_json(a.config), cfg);
  // flags win over the JSON file
  if (!a.problem.empty()) cfg.problem = problem_kind_from_string(a.problem);
  if (!a.sweep.empty()) cfg.sweep = sweep_axis_from_string(a.sweep);
  if (!a.values.empty()) cfg.values = a.values;
  if (!a.methods.empty()) cfg.methods = a.methods;
  if (a.n) cfg.n = *a.n;
  if (a.d) cfg.d = *a.d;
  if (a.sigma) cfg.sigma = *a.sigma;
  if (a.k_star) cfg.k_star = a.k_star;
  if (a.k_star_frac) cfg.k_star_frac = a.k_star_frac;
  if (a.k_mult) cfg.k_mult = *a.k_mult;
  if (a.k) cfg.k_fixed = a.k;
  if (a.trials) cfg.trials = *a.trials;
  if (a.seed) cfg.base_seed = *a.seed;
  if (!a.out.empty()) cfg.out_path = a.out;

  const auto rows = run_experiment(cfg, a.threads);
  if (cfg.out_path.empty()) {
    write_experiment_csv(out, rows);
    return;
  }
  std::ofstream f(cfg.out_path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + cfg.out_path + "' for writing");
  write_experiment_csv(f, rows);
  if (!f) throw Error(ErrorCode::IoError, "write failed for '" + cfg.out_path + "'");
}

void cmd_diagnose_ssc(const DiagArgs& a, std::ostream& out) {
  const io::RegressionFile file = io::read_regression_csv(fs::path(a.input));
  const MatrixXd& X = file.problem.X;
  if (a.group > 0) {
    const GroupPartition part(X.cols(), a.group);
    const Index k_max = a.k_max > 0 ? a.k_max : part.count();
    out << "k,lambda_k,Lambda_k\n";
    for (Index k = 1; k <= k_max; ++k) {
      const SubsetConstants c = sgsc_sgss_exact(X, k, part);
      out << k << ',' << io::format_double(c.lambda_k) << ',' << io::format_double(c.Lambda_k) << '\n';
    }
    return;
  }
  const Index k_max = a.k_max > 0 ? a.k_max : X.cols();
  out << "k,lambda_k,Lambda_k\n";
  for (Index k = 1; k <= k_max; ++k) {
    const SubsetConstants c = ssc_sss_exact(X, k);
    out << k << ',' << io::format_double(c.lambda_k) << ',' << io::format_double(c.Lambda_k) << '\n';
  }
}

void cmd_diagnose_moment(const DiagArgs& a, std::ostream& out) {
  if (a.d < 1 || !(a.samples >= 2)) throw Error(ErrorCode::InvalidArgs, "need --d >= 1 and --samples >= 2");
  const VectorXd lambda = VectorXd::Constant(a.d, a.lambda_norm / std::sqrt(static_cast<double>(a.d)));
  const MomentQuadrature quad = truncated_moment_quadrature(lambda, a.sigma, a.tau);
  const MomentEstimate mc =
      truncated_moment_mc(lambda, a.sigma, a.tau, static_cast<std::uint64_t>(a.samples), a.seed);
  const VectorXd dir = quad.vec.normalized();
  const double cosine = std::clamp(mc.mean.normalized().dot(dir), -1.0, 1.0);
  const double angle = std::acos(cosine) * 180.0 / std::numbers::pi;
  const double along = mc.mean.dot(dir);
  const double se_along = dir.cwiseProduct(mc.std_error).norm();
  const double z = std::abs(along - quad.vec.norm()) / se_along;
  out << "c_tau,c_tau_bound,quad_norm,mc_norm,mc_along,se_along,z_score,angle_deg,samples\n";
  out << io::format_double(quad.c_tau) << ',' << io::format_double(moment_c_tau_bound(a.sigma, a.tau)) << ','
      << io::format_double(quad.vec.norm()) << ',' << io::format_double(mc.mean.norm()) << ','
      << io::format_double(along) << ',' << io::format_double(se_along) << ',' << io::format_double(z) << ','
      << io::format_double(angle) << ',' << mc.samples << '\n';
}

void cmd_diagnose_trace(const DiagArgs& a, std::ostream& out) {
  const fs::path input(a.input);
  io::RegressionFile file = io::read_regression_csv(input);
  const auto truth_json = load_truth(input, a.truth);
  if (!truth_json) throw Error(ErrorCode::MissingTruth, "trace needs a truth sidecar");
  file.problem.truth = io::regression_truth_from_json(*truth_json, file);
  SolverConfig sc;
  sc.k = a.k;
  const auto [est, trace] = solve_crr_traced(file.problem, sc);
  out << "iter,lambda_norm,md,fa,ci,b_err,objective,w_err\n";
  for (const TraceRow& r : trace.rows) {
    out << r.iter << ',' << io::format_double(r.lambda_norm) << ',' << r.md << ',' << r.fa << ',' << r.ci << ','
        << io::format_double(r.b_err) << ',' << io::format_double(r.objective) << ','
        << io::format_double(r.w_err) << '\n';
  }
}

void cmd_plot(const PlotArgs& a, std::ostream& out) {
  std::ifstream in(a.input);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + a.input + "' for reading");
  const auto curves = median_curves(read_experiment_csv(in));
  const std::string svg = render_svg(curves, a.loglog, a.title);
  if (a.out.empty()) {
    out << svg;
    return;
  }
  std::ofstream f(a.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + a.out + "' for writing");
  f << svg;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust regression and robust AR estimation toolkit", "robust_estim"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic problem plus a truth sidecar");
  gen_cmd->require_subcommand(1);
  auto add_gen_flags = [&gen](CLI::App* c) {
    c->add_option("--n", gen.n, "Number of responses");
    c->add_option("--d", gen.d, "Dimension or AR order");
    c->add_option("--sigma", gen.sigma, "Noise standard deviation");
    c->add_option("--kstar", gen.k_star, "Number of corruptions");
    c->add_option("--seed", gen.seed, "Generator seed");
    c->add_option("--low", gen.low, "Smallest corruption magnitude");
    c->add_option("--high", gen.high, "Largest corruption magnitude");
    c->add_flag("--symmetric", gen.symmetric, "Random corruption signs");
    c->add_option("--out", gen.out, "Output prefix");
  };
  auto* gen_reg = gen_cmd->add_subcommand("regression", "Corrupted linear regression (PREFIX.csv)");
  add_gen_flags(gen_reg);
  auto* gen_ar = gen_cmd->add_subcommand("ar", "AR(d) series (PREFIX.series)");
  add_gen_flags(gen_ar);
  gen_ar->add_option("--mode", gen.mode, "clean, additive or innovational");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run one estimator and print a CSV row");
  solve_cmd->add_option("--input", solve.input, "Regression CSV or series file")->required();
  solve_cmd->add_option("--method", solve.method, "crr, crtse, ioard, ols or oracle");
  solve_cmd->add_option("--truth", solve.truth, "Truth sidecar (default: <stem>.truth.json when present)");
  solve_cmd->add_option("--k", solve.k, "Thresholding parameter");
  solve_cmd->add_option("--clip", solve.clip, "auto, none or a fixed level (crtse)");
  solve_cmd->add_option("--tol", solve.tol, "Step-norm stopping tolerance");
  solve_cmd->add_option("--max-iters", solve.max_iters, "Iteration cap");
  solve_cmd->add_option("--support-out", solve.support_out, "Write the estimated corruption support here");
  solve_cmd->add_flag("--header", solve.header, "Print the CSV header first");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a seeded sweep and write one CSV row per cell");
  exp_cmd->add_option("--preset", exp.preset, "fig1a or fig2a");
  exp_cmd->add_option("--config", exp.config, "JSON config; flags override it");
  exp_cmd->add_option("--problem", exp.problem, "regression, ar_additive or ar_innovational");
  exp_cmd->add_option("--sweep", exp.sweep, "n, d, sigma or k_star");
  exp_cmd->add_option("--values", exp.values, "Sweep values")->delimiter(',');
  exp_cmd->add_option("--methods", exp.methods, "Methods")->delimiter(',');
  exp_cmd->add_option("--n", exp.n);
  exp_cmd->add_option("--d", exp.d);
  exp_cmd->add_option("--sigma", exp.sigma);
  exp_cmd->add_option("--kstar", exp.k_star);
  exp_cmd->add_option("--kstar-frac", exp.k_star_frac);
  exp_cmd->add_option("--k-mult", exp.k_mult);
  exp_cmd->add_option("--k", exp.k, "Fixed thresholding parameter");
  exp_cmd->add_option("--trials", exp.trials);
  exp_cmd->add_option("--seed", exp.seed, "Base seed");
  exp_cmd->add_option("--threads", exp.threads, "Worker threads (capped by ROBUST_ESTIM_THREADS)");
  exp_cmd->add_option("--out", exp.out, "Output CSV (default: stdout)");

  DiagArgs diag;
  auto* diag_cmd = app.add_subcommand("diagnose", "Subset eigenvalue constants, moment check, convergence trace");
  diag_cmd->require_subcommand(1);
  auto* diag_ssc = diag_cmd->add_subcommand("ssc", "Exact subset constants for k = 1..kmax");
  diag_ssc->add_option("--input", diag.input, "Regression CSV")->required();
  diag_ssc->add_option("--kmax", diag.k_max, "Largest k (default: all)");
  diag_ssc->add_option("--group", diag.group, "Group size for the group constants");
  auto* diag_moment = diag_cmd->add_subcommand("moment", "Monte-Carlo vs quadrature truncated moment");
  diag_moment->add_option("--tau", diag.tau);
  diag_moment->add_option("--sigma", diag.sigma);
  diag_moment->add_option("--lambda-norm", diag.lambda_norm);
  diag_moment->add_option("--d", diag.d);
  diag_moment->add_option("--samples", diag.samples);
  diag_moment->add_option("--seed", diag.seed);
  auto* diag_trace = diag_cmd->add_subcommand("trace", "Per-iteration support bookkeeping of the solver");
  diag_trace->add_option("--input", diag.input, "Regression CSV")->required();
  diag_trace->add_option("--truth", diag.truth, "Truth sidecar");
  diag_trace->add_option("--k", diag.k, "Thresholding parameter");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Median error curves from an experiment CSV as SVG");
  plot_cmd->add_option("--input", plot.input, "Experiment CSV")->required();
  plot_cmd->add_option("--out", plot.out, "Output SVG (default: stdout)");
  plot_cmd->add_flag("--loglog", plot.loglog, "Log-log axes");
  plot_cmd->add_option("--title", plot.title);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << '\n';
    return 2;
  }

  try {
    if (gen_reg->parsed()) cmd_gen_regression(gen, out);
    else if (gen_ar->parsed()) cmd_gen_ar(gen, out);
    else if (solve_cmd->parsed()) cmd_solve(solve, out, err);
    else if (exp_cmd->parsed()) cmd_experiment(exp, out);
    else if (diag_ssc->parsed()) cmd_diagnose_ssc(diag, out);
    else if (diag_moment->parsed()) cmd_diagnose_moment(diag, out);
    else if (diag_trace->parsed()) cmd_diagnose_trace(diag, out);
    else if (plot_cmd->parsed()) cmd_plot(plot, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace robust
