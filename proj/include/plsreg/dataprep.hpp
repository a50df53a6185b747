#pragma once

#include <string>
#include <vector>

#include "plsreg/types.hpp"

namespace plsreg {

// Predictors and response exactly as read from disk (or built in memory).
struct RawDataset {
  Matrix X;                        // n x p
  Vector y;                        // n
  std::vector<std::string> names;  // p column labels (may be empty for built data)

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
};

// Centered/scaled view of a dataset: every predictor column has mean zero and
// unit sample standard deviation (n-1 denominator); the response is centered.
// The statistics needed to undo the transform travel with the data.
struct StandardizedData {
  Matrix X;
  Vector y;
  Vector x_bar;
  Vector s_x;
  double y_bar = 0.0;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
};

// Cross-moment summaries of standardized data.
struct MomentSummary {
  Matrix S;  // X^T X / (n-1): predictor correlation matrix
  Vector s;  // X^T y / (n-1): predictor-response covariance
  Matrix K;  // X X^T: row-space kernel, shares nonzero eigenvalues with (n-1) S
};

// Coefficients of an affine predictor y ~ intercept + x . beta in the
// original (unstandardized) units.
struct AffineCoefficients {
  double intercept = 0.0;
  Vector beta;
};

StandardizedData standardize(const RawDataset& raw);
MomentSummary moments(const StandardizedData& data);

// Mean absolute off-diagonal entry of the correlation matrix; requires p >= 2.
double mean_abs_correlation(const Matrix& S);

// Comma-separated values with a mandatory header row; the named column is the
// response, everything else a predictor (column order preserved).
RawDataset load_csv(const std::string& path, const std::string& target_column);
void save_csv(const RawDataset& data, const std::string& path,
              const std::string& target_column = "y");

// Map standardized-scale coefficients back to original units:
// beta_orig = beta ./ s_x, intercept = y_bar - x_bar . beta_orig.
AffineCoefficients to_original_scale(const StandardizedData& data, const Vector& beta_std);

}  // namespace plsreg
