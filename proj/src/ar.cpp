#include "robust/ar.hpp"

#include "robust/crr.hpp"
#include "robust/error.hpp"
#include "robust/linalg.hpp"
#include "robust/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace robust {

const char* to_string(CorruptionMode mode) {
  switch (mode) {
    case CorruptionMode::Clean: return "clean";
    case CorruptionMode::Additive: return "additive";
    case CorruptionMode::Innovational: return "innovational";
  }
  return "clean";
}

CorruptionMode corruption_mode_from_string(const std::string& s) {
  if (s == "clean") return CorruptionMode::Clean;
  if (s == "additive") return CorruptionMode::Additive;
  if (s == "innovational") return CorruptionMode::Innovational;
  throw Error(ErrorCode::InvalidArgs, "unknown corruption mode '" + s + "'");
}

VectorXd clip_series(const VectorXd& values, double level) {
  if (!(level > 0.0)) {
    throw Error(ErrorCode::InvalidClipLevel, "clip level must be positive, got " + std::to_string(level));
  }
  return values.cwiseMax(-level).cwiseMin(level);
}

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

double mad_sigma(const VectorXd& values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::TooShort, "need at least two values to estimate scale");
  }
  std::vector<double> diff(static_cast<std::size_t>(values.size() - 1));
  for (Index i = 1; i < values.size(); ++i) diff[i - 1] = values[i] - values[i - 1];
  std::vector<double> work = diff;
  const double med = median_inplace(work);
  for (auto& x : diff) x = std::abs(x - med);
  return 1.4826 * median_inplace(diff) / std::sqrt(2.0);
}

std::optional<double> clip_level_for(const ClipPolicy& policy, const VectorXd& values, Index n) {
  if (std::holds_alternative<ClipNone>(policy)) return std::nullopt;
  if (const auto* fixed = std::get_if<ClipFixed>(&policy)) return fixed->level;
  const auto& mad = std::get<ClipAutoMad>(policy);
  const double mult = mad.multiplier ? *mad.multiplier
                                     : 3.0 * std::sqrt(2.0 * std::log(static_cast<double>(std::max<Index>(n, 2))));
  return mult * mad_sigma(values);
}

LaggedDesign build_lagged_design(const TimeSeriesRecord& record) {
  const Index d = record.d;
  if (d < 1) throw Error(ErrorCode::InvalidArgs, "order d must be >= 1");
  const Index n = record.n();
  if (n < 1) {
    throw Error(ErrorCode::TooShort,
                "series of length " + std::to_string(record.values.size()) + " has no response for d=" +
                    std::to_string(d));
  }
  LaggedDesign out{MatrixXd(d, n), record.values.tail(n)};
  // y_t sits at values[t + d - 1]; column i is response t = i + 1.
  for (Index i = 0; i < n; ++i) {
    for (Index j = 1; j <= d; ++j) out.X(j - 1, i) = record.values[i + d - j];
  }
  return out;
}

TimeSeriesRecord drop_leading(const TimeSeriesRecord& record, Index count) {
  if (count < 0 || count >= record.n()) {
    throw Error(ErrorCode::TooShort, "cannot drop " + std::to_string(count) + " responses");
  }
  TimeSeriesRecord out{record.values.tail(record.values.size() - count), record.d, std::nullopt};
  if (record.truth) {
    GroundTruthTs t = *record.truth;
    std::vector<Index> locs;
    std::vector<double> vals;
    for (std::size_t i = 0; i < t.e_locations.size(); ++i) {
      if (t.e_locations[i] >= count) {
        locs.push_back(t.e_locations[i] - count);
        vals.push_back(t.e_values[static_cast<Index>(i)]);
      }
    }
    t.e_locations = std::move(locs);
    t.e_values = Eigen::Map<const VectorXd>(vals.data(), static_cast<Index>(vals.size()));
    if (t.clean_values.size() == record.values.size()) {
      t.clean_values = VectorXd(t.clean_values.tail(t.clean_values.size() - count));
    }
    if (t.innovations.size() == record.n()) {
      t.innovations = VectorXd(t.innovations.tail(t.innovations.size() - count));
    }
    out.truth = std::move(t);
  }
  return out;
}

Estimate solve_crtse(const TimeSeriesRecord& record, const SolverConfig& config) {
  const Index d = record.d;
  if (d < 1) throw Error(ErrorCode::InvalidArgs, "order d must be >= 1");
  if (record.n() < 1) throw Error(ErrorCode::TooShort, "series has no responses");

  const Index remainder = record.n() % d;
  if (remainder != 0 && !config.trim_to_multiple) {
    throw Error(ErrorCode::NotDivisible,
                std::to_string(d) + " does not divide n=" + std::to_string(record.n()));
  }
  TimeSeriesRecord work = remainder == 0 ? record : drop_leading(record, remainder);

  const std::optional<double> level = clip_level_for(config.clip, work.values, work.n());
  if (level) work.values = clip_series(work.values, *level);

  const LaggedDesign design = build_lagged_design(work);
  const GroupPartition part(work.n(), d);

  Index k = 0;
  if (config.k) {
    k = *config.k;
  } else if (record.truth) {
    k = 2 * record.truth->k_star();
  } else {
    throw Error(ErrorCode::InvalidK, "k unset and no ground truth to default from");
  }
  if (k < 0 || k > part.count()) {
    throw Error(ErrorCode::InvalidK,
                "k=" + std::to_string(k) + " outside [0, " + std::to_string(part.count()) + "] groups");
  }

  const Projector proj(design.X);
  Estimate est = iterate_thresholded(
      proj, design.y, VectorXd::Zero(work.n()),
      [k, &part](const VectorXd& v) { return group_hard_threshold(v, k, part); }, config);
  est.k = k;
  est.trimmed = remainder;
  est.clip_level = level;
  return est;
}

Estimate solve_ioard(const TimeSeriesRecord& record, const SolverConfig& config) {
  const LaggedDesign design = build_lagged_design(record);
  std::optional<GroundTruthReg> truth;
  if (record.truth) {
    GroundTruthReg t;
    t.support = record.truth->e_locations;
    truth = std::move(t);
  }
  const Index k = resolve_pointwise_k(config, truth, record.n());
  const Projector proj(design.X);
  Estimate est = iterate_thresholded(proj, design.y, VectorXd::Zero(record.n()),
                                     [k](const VectorXd& v) { return hard_threshold(v, k); }, config);
  est.k = k;
  return est;
}

Estimate solve_ar_ols(const TimeSeriesRecord& record) {
  const LaggedDesign design = build_lagged_design(record);
  const Projector proj(design.X);
  Estimate est;
  est.w = proj.coefficients(design.y);
  est.b = VectorXd::Zero(record.n());
  est.objective = proj.objective(design.y, est.b);
  est.termination = Termination::Converged;
  return est;
}

}  // namespace robust
