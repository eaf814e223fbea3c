#pragma once

#include "robust/ar.hpp"
#include "robust/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace robust::io {

/// "%.17g"; NaN is written as an empty field.
std::string format_double(double v);

/// Strict parse of a full field. Errors: ParseError.
double parse_double(const std::string& s);
long long parse_int(const std::string& s);

std::vector<std::string> split_csv_line(const std::string& line);

// Series files: a "# d=<order> n=<length>" header, then y_{-d+1}..y_n one per line.
void write_series(std::ostream& os, const TimeSeriesRecord& record);
void write_series(const std::filesystem::path& path, const TimeSeriesRecord& record);
TimeSeriesRecord read_series(std::istream& is);
TimeSeriesRecord read_series(const std::filesystem::path& path);

// Regression CSV: header x_1..x_d,y,b_star,eps and one row per point. Without ground
// truth the b_star and eps fields are empty.
void write_regression_csv(std::ostream& os, const RegressionProblem& problem);
void write_regression_csv(const std::filesystem::path& path, const RegressionProblem& problem);

struct RegressionFile {
  RegressionProblem problem;
  VectorXd b_star;  // empty when the file carries no b_star column values
  VectorXd eps;
};
RegressionFile read_regression_csv(std::istream& is);
RegressionFile read_regression_csv(const std::filesystem::path& path);

// Truth sidecars (JSON).
nlohmann::json regression_truth_json(const GroundTruthReg& truth, Index n, Index d, std::uint64_t seed);
nlohmann::json series_truth_json(const GroundTruthTs& truth, Index n, Index d, std::uint64_t seed);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Rebuilds GroundTruthReg from a sidecar plus the b_star/eps columns of the CSV.
GroundTruthReg regression_truth_from_json(const nlohmann::json& j, const RegressionFile& file);
/// Rebuilds the parts of GroundTruthTs a sidecar carries (no clean values or innovations).
GroundTruthTs series_truth_from_json(const nlohmann::json& j);

}  // namespace robust::io
