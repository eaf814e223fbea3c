#pragma once

#include "robust/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace robust {

enum class ProblemKind { Regression, ArAdditive, ArInnovational };
enum class SweepAxis { N, D, Sigma, KStar };

const char* to_string(ProblemKind p);
const char* to_string(SweepAxis a);
ProblemKind problem_kind_from_string(const std::string& s);
SweepAxis sweep_axis_from_string(const std::string& s);

/// Methods understood by the harness: crr, crtse, ioard, ols, oracle.
struct ExperimentConfig {
  ProblemKind problem = ProblemKind::Regression;
  SweepAxis sweep = SweepAxis::N;
  std::vector<double> values;
  Index n = 1000;
  Index d = 10;
  double sigma = 1.0;
  // k* is the first of: the sweep value (k-sweeps), k_star, floor(k_star_frac * n).
  std::optional<Index> k_star;
  std::optional<double> k_star_frac;
  // Thresholding parameter: k_fixed when set, else floor(k_mult * k*). Pointwise
  // methods on additive series use k_mult * k* * d, one slot per polluted row.
  double k_mult = 2.0;
  std::optional<Index> k_fixed;
  std::vector<std::string> methods{"crr", "ols"};
  int trials = 20;
  std::uint64_t base_seed = 1;
  std::string out_path;
  double corruption_low = 10.0;
  double corruption_high = 20.0;
  bool symmetric = false;
  ClipPolicy clip = ClipAutoMad{};
  double tol = 1e-8;
  int max_iters = 500;
};

/// Errors: InvalidArgs for an unknown preset name.
ExperimentConfig preset_config(const std::string& name);

/// Overlays the keys present in `j` onto `base`. Errors: ParseError, InvalidArgs.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

/// Errors: InvalidArgs (bad sweep, trials, method/problem mismatch), TooLarge (oracle cells).
void validate(const ExperimentConfig& cfg);

struct ExperimentRow {
  std::string sweep_param;
  double sweep_value = 0.0;
  int trial = 0;
  std::string method;
  Index n = 0;
  Index d = 0;
  Index k = 0;
  Index k_star = 0;
  double sigma = 0.0;
  double err_l2 = 0.0;  // NaN when the solve failed
  int iters = 0;
  std::string termination;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
};

inline const char* kExperimentHeader =
    "sweep_param,sweep_value,trial,method,n,d,k,k_star,sigma,err_l2,iters,termination,wall_ms,seed";

/// base_seed XOR mix(sweep_index << 32 | trial); injective in the cell.
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t sweep_index, int trial);

/// Runs every (sweep value, trial, method) cell; rows sorted by (sweep_value, trial, method).
/// `threads` <= 0 means ROBUST_ESTIM_THREADS or the OpenMP default.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg, int threads = 0);

void write_experiment_csv(std::ostream& os, const std::vector<ExperimentRow>& rows);
/// Errors: ParseError.
std::vector<ExperimentRow> read_experiment_csv(std::istream& is);

double median(std::vector<double> v);

struct MethodCurve {
  std::string method;
  std::vector<double> x;
  std::vector<double> median_err;
};

/// Median err_l2 per (method, sweep_value), failed rows skipped. Errors: ParseError when empty.
std::vector<MethodCurve> median_curves(const std::vector<ExperimentRow>& rows);

/// Self-contained SVG with one polyline per method.
std::string render_svg(const std::vector<MethodCurve>& curves, bool loglog, const std::string& title = "");

}  // namespace robust
