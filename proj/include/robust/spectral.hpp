#pragma once

#include "robust/types.hpp"

namespace robust {

inline constexpr Index kDefaultSpectralGrid = 4096;
inline constexpr Index kMinSpectralGrid = 256;

/// Spectral quantities of a stationary AR(d) process with innovation std sigma.
struct SpectralSummary {
  double big_m = 0.0;           // sup of the spectral density
  double small_m = 0.0;         // inf of the spectral density
  double m_w_companion = 0.0;   // VAR(1) bound sigma^2 / inf lambda_min(A(w)^H A(w))
  Index grid_size = kDefaultSpectralGrid;
  double sigma = 1.0;
  VectorXd w;
};

/// First row w, ones on the subdiagonal.
MatrixXd companion_matrix(const VectorXd& w);

double companion_spectral_radius(const VectorXd& w);

/// max |eig(companion(w))| < 1 - 1e-9.
bool stationarity_check(const VectorXd& w);

/// sigma^2 / |1 - sum_k w_k e^{ik omega}|^2. Errors: NonStationary.
double spectral_density(const VectorXd& w, double sigma, double omega);

/// (sup, inf) of the density: uniform grid on [0, 2 pi) plus golden-section refinement
/// around the grid extremes. Errors: NonStationary, InvalidArgs (grid_size < 256).
std::pair<double, double> spectral_extrema(const VectorXd& w, double sigma,
                                           Index grid_size = kDefaultSpectralGrid);

/// Real 2d x 2d embedding [[Re H, -Im H], [Im H, Re H]] of
/// H = (I - W^T e^{i omega})(I - W e^{-i omega}); its spectrum is that of H, doubled.
MatrixXd var_symbol_embedding(const VectorXd& w, double omega);

/// lambda_min of H(omega).
double var_symbol_min_eigenvalue(const VectorXd& w, double omega);

/// sigma^2 / inf_omega lambda_min(H(omega)). Errors: NonStationary, InvalidArgs.
double var_spectral_bound(const VectorXd& w, double sigma, Index grid_size = kDefaultSpectralGrid);

SpectralSummary summarize_spectrum(const VectorXd& w, double sigma, Index grid_size = kDefaultSpectralGrid);

}  // namespace robust
