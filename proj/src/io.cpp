#include "robust/io.hpp"

#include "robust/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace robust::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(ErrorCode::ParseError, "not a number: '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::ParseError, "not an integer: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

void write_series(std::ostream& os, const TimeSeriesRecord& record) {
  os << "# d=" << record.d << " n=" << record.n() << '\n';
  for (Index i = 0; i < record.values.size(); ++i) os << format_double(record.values[i]) << '\n';
}

void write_series(const fs::path& path, const TimeSeriesRecord& record) {
  auto out = open_out(path);
  write_series(out, record);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

TimeSeriesRecord read_series(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw Error(ErrorCode::ParseError, "empty series file");
  long long d = 0, n = 0;
  if (std::sscanf(header.c_str(), "# d=%lld n=%lld", &d, &n) != 2 || d < 1 || n < 0) {
    throw Error(ErrorCode::ParseError, "bad series header '" + header + "'");
  }
  std::vector<double> values;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    values.push_back(parse_double(line));
  }
  if (static_cast<long long>(values.size()) != n + d) {
    throw Error(ErrorCode::ParseError, "header promises " + std::to_string(n + d) + " values, found " +
                                           std::to_string(values.size()));
  }
  return TimeSeriesRecord{to_eigen(values), static_cast<Index>(d), std::nullopt};
}

TimeSeriesRecord read_series(const fs::path& path) {
  auto in = open_in(path);
  return read_series(in);
}

void write_regression_csv(std::ostream& os, const RegressionProblem& problem) {
  const Index d = problem.d();
  for (Index j = 0; j < d; ++j) os << "x_" << (j + 1) << ',';
  os << "y,b_star,eps\n";
  for (Index i = 0; i < problem.n(); ++i) {
    for (Index j = 0; j < d; ++j) os << format_double(problem.X(j, i)) << ',';
    os << format_double(problem.y[i]) << ',';
    if (problem.truth) {
      os << format_double(problem.truth->b_star[i]) << ',' << format_double(problem.truth->eps[i]);
    } else {
      os << ',';
    }
    os << '\n';
  }
}

void write_regression_csv(const fs::path& path, const RegressionProblem& problem) {
  auto out = open_out(path);
  write_regression_csv(out, problem);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

RegressionFile read_regression_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::ParseError, "empty regression file");
  const auto header = split_csv_line(line);
  Index d = 0;
  while (d < static_cast<Index>(header.size()) && header[d] == "x_" + std::to_string(d + 1)) ++d;
  if (d < 1 || static_cast<Index>(header.size()) < d + 1 || header[d] != "y") {
    throw Error(ErrorCode::ParseError, "header must be x_1..x_d,y[,b_star,eps]");
  }
  const bool has_b = static_cast<Index>(header.size()) > d + 1 && header[d + 1] == "b_star";
  const bool has_eps = static_cast<Index>(header.size()) > d + 2 && header[d + 2] == "eps";

  std::vector<double> xs, ys, bs, es;
  bool b_complete = has_b, e_complete = has_eps;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) throw Error(ErrorCode::ParseError, "row width differs from header");
    for (Index j = 0; j < d; ++j) xs.push_back(parse_double(f[j]));
    ys.push_back(parse_double(f[d]));
    if (has_b) {
      if (f[d + 1].empty()) b_complete = false; else bs.push_back(parse_double(f[d + 1]));
    }
    if (has_eps) {
      if (f[d + 2].empty()) e_complete = false; else es.push_back(parse_double(f[d + 2]));
    }
  }
  const Index n = static_cast<Index>(ys.size());
  if (n == 0) throw Error(ErrorCode::ParseError, "no data rows");
  RegressionFile out;
  out.problem.X = Eigen::Map<const MatrixXd>(xs.data(), d, n);
  out.problem.y = to_eigen(ys);
  if (b_complete && static_cast<Index>(bs.size()) == n) out.b_star = to_eigen(bs);
  if (e_complete && static_cast<Index>(es.size()) == n) out.eps = to_eigen(es);
  return out;
}

RegressionFile read_regression_csv(const fs::path& path) {
  auto in = open_in(path);
  return read_regression_csv(in);
}

nlohmann::json regression_truth_json(const GroundTruthReg& truth, Index n, Index d, std::uint64_t seed) {
  nlohmann::json j;
  j["kind"] = "regression";
  j["n"] = n;
  j["d"] = d;
  j["sigma"] = truth.sigma;
  j["seed"] = seed;
  j["k_star"] = truth.k_star();
  j["w_star"] = to_std(truth.w_star);
  j["support"] = truth.support;
  return j;
}

nlohmann::json series_truth_json(const GroundTruthTs& truth, Index n, Index d, std::uint64_t seed) {
  nlohmann::json j;
  j["kind"] = "ar";
  j["mode"] = to_string(truth.mode);
  j["n"] = n;
  j["d"] = d;
  j["sigma"] = truth.sigma;
  j["seed"] = seed;
  j["k_star"] = truth.k_star();
  j["w_star"] = to_std(truth.w_star);
  j["support"] = truth.e_locations;
  j["e_values"] = to_std(truth.e_values);
  return j;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

nlohmann::json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

GroundTruthReg regression_truth_from_json(const nlohmann::json& j, const RegressionFile& file) {
  try {
    GroundTruthReg t;
    t.w_star = to_eigen(j.at("w_star").get<std::vector<double>>());
    t.support = j.at("support").get<std::vector<Index>>();
    t.sigma = j.at("sigma").get<double>();
    const Index n = file.problem.n();
    t.b_star = file.b_star.size() == n ? file.b_star : VectorXd::Zero(n);
    t.eps = file.eps.size() == n ? file.eps : VectorXd::Zero(n);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("truth sidecar: ") + e.what());
  }
}

GroundTruthTs series_truth_from_json(const nlohmann::json& j) {
  try {
    GroundTruthTs t;
    t.w_star = to_eigen(j.at("w_star").get<std::vector<double>>());
    t.sigma = j.at("sigma").get<double>();
    t.mode = corruption_mode_from_string(j.at("mode").get<std::string>());
    t.e_locations = j.at("support").get<std::vector<Index>>();
    t.e_values = to_eigen(j.value("e_values", std::vector<double>{}));
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("truth sidecar: ") + e.what());
  }
}

}  // namespace robust::io
