#pragma once

#include <optional>
#include <vector>

#include "plsreg/dataprep.hpp"
#include "plsreg/types.hpp"

namespace plsreg {

// A fitted partial-least-squares path for m = 0 .. components().
//
// Column m of beta_path holds the coefficient vector after m latent
// components in the standardized scale (column 0 is zero: the mean model).
// intercept_path and fitted_path are in original response units.
struct PlsModel {
  int m_max = 0;         // requested path length
  Matrix T;              // n x m orthonormal latent components
  Matrix V;              // p x m pseudo-weights: T = X V, ||X v_i|| = 1
  Matrix W;              // p x m raw weight vectors (pre-orthogonalization)
  Matrix L;              // m x m coupling matrix T^T X W (upper bidiagonal)
  Matrix beta_path;      // p x (m+1)
  Vector intercept_path; // m+1
  Matrix fitted_path;    // n x (m+1)
  // First component the Krylov space could not supply (1-based), if any.
  std::optional<int> truncated_at;

  int components() const { return static_cast<int>(T.cols()); }
};

// Fit by the weight-vector recursion: w_i is the gradient of the residual sum
// of squares at the current coefficients, orthogonalized (in the X^T X inner
// product) against every previous pseudo-weight, then normalized so that the
// latent component t_i = X v_i has unit length.  Requires 0 <= m_max <=
// min(n-1, p); stops early (recording truncated_at) when a component
// degenerates.
PlsModel fit_pls(const StandardizedData& data, int m_max);

// Independent reference: classical deflation algorithm (scores computed from
// successively deflated predictor matrices).  Spans the same latent space; the
// fitted path must agree with fit_pls to high accuracy.
PlsModel fit_nipals_reference(const StandardizedData& data, int m_max);

// Intercept and coefficients in original units for the m-component model.
AffineCoefficients coefficients_original_scale(const PlsModel& model, int m,
                                               const StandardizedData& data);

// Apply an affine model to raw (unstandardized) predictor rows.
Vector predict(double intercept, const Vector& beta, const Matrix& X_new_raw);

namespace detail {

// Shared primal state of the weight-vector recursion; the complexity engines
// replay the same path when propagating derivatives.
struct LanczosState {
  int m = 0;                              // components produced
  std::vector<Vector> vhat;               // p: normalized pseudo-weights
  std::vector<Vector> that;               // n: unit latent components
  std::vector<Vector> g;                  // p: g_i = X^T t_i
  std::vector<Vector> w;                  // p: raw weights
  std::vector<Vector> z;                  // p: z_i = X^T X w_i
  std::vector<std::vector<double>> proj;  // proj[i][j] = vhat_j . z_i for j < i
  std::vector<double> tnorm;              // ||X v_i|| before normalization
  std::vector<double> a;                  // t_i . y
  std::vector<char> flipped;              // sign convention t_i . y >= 0 applied
  Matrix beta_path;                       // p x (m+1)
  std::optional<int> truncated_at;
};

LanczosState run_lanczos_recursion(const Matrix& X, const Vector& y, int m_max);

}  // namespace detail

}  // namespace plsreg
