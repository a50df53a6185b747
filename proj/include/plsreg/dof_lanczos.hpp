#pragma once

#include <optional>
#include <vector>

#include "plsreg/dataprep.hpp"
#include "plsreg/dof_profile.hpp"
#include "plsreg/pls.hpp"
#include "plsreg/types.hpp"

namespace plsreg {

enum class Kernel {
  Blocked,    // OpenMP over fixed column blocks; reductions in block order
  Reference,  // single-pass whole-matrix form kept as the comparison baseline
};

struct LanczosOptions {
  bool retain_jacobians = false;  // keep dBeta[m] for every m
  bool retain_hats = false;       // keep the influence matrix H[m] for every m
  Kernel kernel = Kernel::Blocked;
};

// Exact derivative of the fitted-value map, propagated component by component.
//
// dBeta[m] is the p x n Jacobian of the m-component coefficient vector with
// respect to the response; dof[m] = 1 + trace(X dBeta[m]) counts the fitted
// intercept.  The propagation replays the fit's own recursion, differentiating
// the gradient step, the orthogonalization, and the normalization in turn.
struct JacobianPath {
  Matrix X;                   // standardized predictors the path refers to
  std::vector<double> dof;    // index m = 0 .. components computed
  std::vector<Matrix> dBeta;  // retained only on request (p x n each)
  std::vector<Matrix> hats;   // retained only on request (n x n each)
  std::optional<int> truncated_at;
  TruncationReason reason = TruncationReason::None;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
};

JacobianPath dof_lanczos(const StandardizedData& data, int m_max, const LanczosOptions& options = {});

DofProfile dof_profile_lanczos(const StandardizedData& data, int m_max,
                               const LanczosOptions& options = {});

// Influence matrix of the m-component fit: H_m = (1/n) 1 1^T + X dBeta[m].
// Rows sum to one; trace(H_m) = dof[m].
Matrix approximate_hat_matrix(const JacobianPath& path, int m);

// First-order coefficient covariance sigma^2 dBeta[m] dBeta[m]^T in the
// standardized scale.
Matrix coefficient_covariance(const JacobianPath& path, int m, double sigma_hat);

}  // namespace plsreg
