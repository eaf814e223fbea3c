#include "robust/spectral.hpp"

#include "robust/error.hpp"
#include "robust/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

namespace robust {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_stationary(const VectorXd& w) {
  if (!stationarity_check(w)) {
    throw Error(ErrorCode::NonStationary,
                "companion spectral radius " + std::to_string(companion_spectral_radius(w)) + " >= 1");
  }
}

void require_grid(Index grid_size) {
  if (grid_size < kMinSpectralGrid) {
    throw Error(ErrorCode::InvalidArgs, "grid_size must be >= " + std::to_string(kMinSpectralGrid));
  }
}

// |1 - sum_k w_k e^{ik omega}|^2 with the real and imaginary parts carried separately.
double transfer_modulus2(const VectorXd& w, double omega) {
  double re = 1.0;
  double im = 0.0;
  for (Index k = 0; k < w.size(); ++k) {
    const double angle = static_cast<double>(k + 1) * omega;
    re -= w[k] * std::cos(angle);
    im -= w[k] * std::sin(angle);
  }
  return re * re + im * im;
}

// Golden-section search for the maximum of f on [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && (b - a) > 1e-14; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

// Grid extreme of f on [0, 2 pi), refined on the two neighbouring cells.
double refined_max(const std::function<double(double)>& f, Index grid_size) {
  const double h = kTwoPi / static_cast<double>(grid_size);
  Index best = 0;
  double best_val = f(0.0);
  for (Index i = 1; i < grid_size; ++i) {
    const double v = f(h * static_cast<double>(i));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double centre = h * static_cast<double>(best);
  return std::max(best_val, golden_max(f, centre - h, centre + h));
}

}  // namespace

MatrixXd companion_matrix(const VectorXd& w) {
  const Index d = w.size();
  MatrixXd c = MatrixXd::Zero(d, d);
  c.row(0) = w.transpose();
  for (Index i = 1; i < d; ++i) c(i, i - 1) = 1.0;
  return c;
}

double companion_spectral_radius(const VectorXd& w) {
  if (w.size() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> es(companion_matrix(w), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool stationarity_check(const VectorXd& w) { return companion_spectral_radius(w) < 1.0 - 1e-9; }

double spectral_density(const VectorXd& w, double sigma, double omega) {
  require_stationary(w);
  return sigma * sigma / transfer_modulus2(w, omega);
}

std::pair<double, double> spectral_extrema(const VectorXd& w, double sigma, Index grid_size) {
  require_stationary(w);
  require_grid(grid_size);
  const double s2 = sigma * sigma;
  // The density extremes are the reciprocal extremes of the transfer modulus.
  const double mod_max = refined_max([&w](double om) { return transfer_modulus2(w, om); }, grid_size);
  const double mod_min = -refined_max([&w](double om) { return -transfer_modulus2(w, om); }, grid_size);
  return {s2 / mod_min, s2 / mod_max};
}

MatrixXd var_symbol_embedding(const VectorXd& w, double omega) {
  const Index d = w.size();
  const MatrixXd W = companion_matrix(w);
  // A = I - W e^{-i omega} = (I - cos(omega) W) + i sin(omega) W, H = A^H A.
  const MatrixXd re = MatrixXd::Identity(d, d) - std::cos(omega) * W;
  const MatrixXd im = std::sin(omega) * W;
  const MatrixXd h_re = re.transpose() * re + im.transpose() * im;
  const MatrixXd h_im = re.transpose() * im - im.transpose() * re;
  MatrixXd out(2 * d, 2 * d);
  out << h_re, -h_im, h_im, h_re;
  return out;
}

double var_symbol_min_eigenvalue(const VectorXd& w, double omega) {
  return symmetric_eig_extrema(var_symbol_embedding(w, omega)).first;
}

double var_spectral_bound(const VectorXd& w, double sigma, Index grid_size) {
  require_stationary(w);
  require_grid(grid_size);
  const double inf_eig = -refined_max([&w](double om) { return -var_symbol_min_eigenvalue(w, om); }, grid_size);
  return sigma * sigma / inf_eig;
}

SpectralSummary summarize_spectrum(const VectorXd& w, double sigma, Index grid_size) {
  const auto [big, small] = spectral_extrema(w, sigma, grid_size);
  SpectralSummary s;
  s.big_m = big;
  s.small_m = small;
  s.m_w_companion = var_spectral_bound(w, sigma, grid_size);
  s.grid_size = grid_size;
  s.sigma = sigma;
  s.w = w;
  return s;
}

}  // namespace robust
