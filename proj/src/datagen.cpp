#include "robust/datagen.hpp"

#include "robust/error.hpp"
#include "robust/rng.hpp"
#include "robust/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace robust {

namespace {

void check_plan(const CorruptionPlan& plan, Index n) {
  if (plan.k_star < 0 || plan.k_star > n) {
    throw Error(ErrorCode::InvalidPlan, "k*=" + std::to_string(plan.k_star) + " outside [0, " + std::to_string(n) + "]");
  }
  if (!(plan.low < plan.high)) {
    throw Error(ErrorCode::InvalidPlan, "need low < high for corruption magnitudes");
  }
}

VectorXd draw_values(const CorruptionPlan& plan, std::uint64_t seed) {
  CounterRng rng(seed, Stream::CorruptionValues);
  std::uniform_real_distribution<double> mag(plan.low, plan.high);
  std::bernoulli_distribution coin(0.5);
  VectorXd out(plan.k_star);
  for (Index i = 0; i < plan.k_star; ++i) {
    double v = mag(rng);
    if (plan.sign == CorruptionSign::Symmetric && coin(rng)) v = -v;
    out[i] = v;
  }
  return out;
}

struct Simulation {
  VectorXd values;       // n + d recorded values
  VectorXd innovations;  // innovations of the last n steps (before corruption)
};

// Initial d values N(0, 1), then burn_in + n + d recursion steps; the last n + d
// values are recorded. `extra` (length n) is added to the innovations of the
// last n steps, i.e. to responses y_1..y_n.
Simulation simulate(const VectorXd& w, double sigma, Index n, Index burn_in, std::uint64_t seed,
                    const VectorXd* extra) {
  const Index d = w.size();
  CounterRng init_rng(seed, Stream::SeriesInit);
  CounterRng noise_rng(seed, Stream::Noise);
  std::normal_distribution<double> normal(0.0, 1.0);

  const Index steps = burn_in + n + d;
  std::vector<double> x(static_cast<std::size_t>(d + steps));
  for (Index i = 0; i < d; ++i) x[i] = normal(init_rng);

  Simulation sim{VectorXd(n + d), VectorXd(n)};
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Index s = 0; s < steps; ++s) {
    const Index t = d + s;
    double eps = sigma * noise(noise_rng);
    const Index response = s - (steps - n);  // index among y_1..y_n, negative before
    double shock = eps;
    if (response >= 0) {
      sim.innovations[response] = eps;
      if (extra) shock += (*extra)[response];
    }
    double acc = shock;
    for (Index j = 1; j <= d; ++j) acc += w[j - 1] * x[t - j];
    x[t] = acc;
  }
  for (Index i = 0; i < n + d; ++i) sim.values[i] = x[x.size() - static_cast<std::size_t>(n + d) + i];
  return sim;
}

VectorXd ar_coefficients(Index d, std::uint64_t seed, const ArGenOptions& opts) {
  if (opts.forced_w) {
    if (opts.forced_w->size() != d) throw Error(ErrorCode::InvalidSize, "forced w has wrong length");
    return *opts.forced_w;
  }
  const double norm = opts.w_norm < 0.0 ? 0.9 / std::sqrt(static_cast<double>(d)) : opts.w_norm;
  return draw_ar_coefficients(d, seed, norm, opts.max_radius, opts.max_redraws).w;
}

void check_ar_sizes(Index n, Index d, double sigma, Index burn_in) {
  if (d < 1 || n < d + 1 || !(sigma >= 0.0) || burn_in < 0) {
    throw Error(ErrorCode::InvalidSize, "need d >= 1, n >= d + 1, sigma >= 0, burn_in >= 0 (n=" +
                                            std::to_string(n) + ", d=" + std::to_string(d) + ")");
  }
}

}  // namespace

std::vector<Index> draw_locations(Index n, Index k, std::uint64_t seed) {
  CounterRng rng(seed, Stream::CorruptionLocations);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  perm.resize(static_cast<std::size_t>(k));
  std::sort(perm.begin(), perm.end());
  return perm;
}

RegressionProblem gen_regression(Index n, Index d, double sigma, const CorruptionPlan& plan, std::uint64_t seed) {
  if (d < 1 || n < d || !(sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidSize, "need n >= d >= 1 and sigma >= 0");
  }
  check_plan(plan, n);
  std::normal_distribution<double> normal(0.0, 1.0);

  CounterRng w_rng(seed, Stream::WStar);
  VectorXd w(d);
  do {
    for (Index j = 0; j < d; ++j) w[j] = normal(w_rng);
  } while (w.norm() == 0.0);
  w.normalize();

  CounterRng x_rng(seed, Stream::Design);
  MatrixXd X(d, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) X(j, i) = normal(x_rng);
  }

  CounterRng e_rng(seed, Stream::Noise);
  VectorXd eps(n);
  for (Index i = 0; i < n; ++i) eps[i] = sigma * normal(e_rng);

  GroundTruthReg truth;
  truth.support = draw_locations(n, plan.k_star, seed);
  truth.b_star = VectorXd::Zero(n);
  const VectorXd vals = draw_values(plan, seed);
  for (Index i = 0; i < plan.k_star; ++i) truth.b_star[truth.support[i]] = vals[i];
  truth.w_star = w;
  truth.eps = eps;
  truth.sigma = sigma;

  RegressionProblem p;
  p.y = X.transpose() * w + eps + truth.b_star;
  p.X = std::move(X);
  p.truth = std::move(truth);
  return p;
}

CoefficientDraw draw_ar_coefficients(Index d, std::uint64_t seed, double norm, double max_radius,
                                     int max_redraws) {
  CounterRng rng(seed, Stream::WStar);
  std::normal_distribution<double> normal(0.0, 1.0);
  CoefficientDraw out{VectorXd(d), 0};
  for (int attempt = 0; attempt <= max_redraws; ++attempt) {
    for (Index j = 0; j < d; ++j) out.w[j] = normal(rng);
    if (out.w.norm() == 0.0) continue;
    out.w *= norm / out.w.norm();
    if (companion_spectral_radius(out.w) < max_radius) {
      out.redraws = attempt;
      return out;
    }
  }
  throw Error(ErrorCode::NonStationary, "no stationary coefficient draw within the redraw budget");
}

TimeSeriesRecord gen_ar_series(Index n, Index d, double sigma, std::uint64_t seed, const ArGenOptions& opts) {
  check_ar_sizes(n, d, sigma, opts.burn_in);
  const VectorXd w = ar_coefficients(d, seed, opts);
  Simulation sim = simulate(w, sigma, n, opts.burn_in, seed, nullptr);

  GroundTruthTs truth;
  truth.w_star = w;
  truth.sigma = sigma;
  truth.mode = CorruptionMode::Clean;
  truth.e_values = VectorXd(0);
  truth.clean_values = sim.values;
  truth.innovations = std::move(sim.innovations);
  return TimeSeriesRecord{std::move(sim.values), d, std::move(truth)};
}

TimeSeriesRecord inject_additive(const TimeSeriesRecord& clean, const CorruptionPlan& plan) {
  const Index n = clean.n();
  check_plan(plan, n);
  TimeSeriesRecord out = clean;
  GroundTruthTs truth = clean.truth ? *clean.truth : GroundTruthTs{};
  if (!clean.truth) truth.clean_values = clean.values;
  truth.mode = CorruptionMode::Additive;
  truth.e_locations = draw_locations(n, plan.k_star, plan.seed);
  truth.e_values = draw_values(plan, plan.seed);
  for (Index i = 0; i < plan.k_star; ++i) out.values[truth.e_locations[i] + clean.d] += truth.e_values[i];
  out.truth = std::move(truth);
  return out;
}

TimeSeriesRecord gen_ar_series_io(Index n, Index d, double sigma, const CorruptionPlan& plan, std::uint64_t seed,
                                  const ArGenOptions& opts) {
  check_ar_sizes(n, d, sigma, opts.burn_in);
  check_plan(plan, n);
  const VectorXd w = ar_coefficients(d, seed, opts);

  const std::vector<Index> locs = draw_locations(n, plan.k_star, seed);
  const VectorXd vals = draw_values(plan, seed);
  VectorXd extra = VectorXd::Zero(n);
  for (Index i = 0; i < plan.k_star; ++i) extra[locs[i]] = vals[i];

  Simulation sim = simulate(w, sigma, n, opts.burn_in, seed, &extra);
  Simulation twin = simulate(w, sigma, n, opts.burn_in, seed, nullptr);

  GroundTruthTs truth;
  truth.w_star = w;
  truth.sigma = sigma;
  truth.mode = CorruptionMode::Innovational;
  truth.e_locations = locs;
  truth.e_values = vals;
  truth.clean_values = std::move(twin.values);
  truth.innovations = std::move(sim.innovations);
  return TimeSeriesRecord{std::move(sim.values), d, std::move(truth)};
}

}  // namespace robust
