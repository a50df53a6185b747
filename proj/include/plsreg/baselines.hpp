#pragma once

#include <vector>

#include "plsreg/dataprep.hpp"
#include "plsreg/types.hpp"

namespace plsreg {

// Ridge regression on standardized data.  Complexity is the closed form
// 1 + sum_i d_i / (d_i + lambda) over the eigenvalues d_i of X^T X.
struct RidgeModel {
  double lambda = 0.0;
  Vector beta;        // standardized scale
  double intercept;   // original units
  double dof;
  Vector fitted;      // original response units
};

RidgeModel fit_ridge(const StandardizedData& data, double lambda);

// Principal-components regression path for m = 0 .. m_max components,
// ordered by descending eigenvalue of the correlation matrix.
struct PcrModel {
  int m_max = 0;
  Matrix directions;   // p x m_max eigenvectors used
  Vector eigenvalues;  // corresponding eigenvalues, descending
  Matrix beta_path;    // p x (m_max+1), standardized scale
  Matrix fitted_path;  // n x (m_max+1), original response units

  // Projection on a fixed m-dimensional subspace estimates m + 1 parameters.
  double dof(int m) const { return m + 1.0; }
};

PcrModel fit_pcr(const StandardizedData& data, int m_max);

// Ordinary least squares (minimum-norm when rank deficient).
struct OlsFit {
  Vector beta;     // standardized scale
  Vector fitted;   // original response units
  Matrix hat;      // influence matrix of the centered fit (no intercept part)
  Index rank = 0;
  bool used_pseudoinverse = false;
};

OlsFit fit_ols(const StandardizedData& data);

// Mean squared gap between two fitted-value vectors (how far a constrained
// fit sits from the least-squares fit).
double approximation_error(const Vector& y_fit_a, const Vector& y_fit_b);

}  // namespace plsreg
