#pragma once

#include <functional>
#include <optional>

#include "plsreg/types.hpp"

namespace plsreg {

struct FdConfig {
  // Step size; 0 selects the default rule 1e-5 * (1 + max |y_i|).
  double epsilon = 0.0;
  enum class Scheme { Forward, Central } scheme = Scheme::Central;
};

// Numerical trace of the Jacobian of an arbitrary fitted-value map: perturb
// each response coordinate in turn and accumulate the diagonal entries.  The
// map is evaluated twice at the unperturbed response first; any disagreement
// means the map is not a function of its input and the estimate would be
// meaningless.  The map must be pure: perturbed evaluations may run
// concurrently.
double fd_trace(const std::function<Vector(const Vector&)>& fit_fn, const Vector& y,
                const FdConfig& config = {});

// Exact model complexity of the one-component fit, directly from the moment
// summaries S = X^T X/(n-1) and s = X^T y/(n-1):
//   dof(1) = 3 + (s.s / s.Ss) * ( trace(S) - 2 (s.SSs) / (s.Ss) ).
double closed_form_dof_one_component(const Matrix& S, const Vector& s);

// Spectral lower bound for the one-component fit: when the largest eigenvalue
// of S is at most half its trace, dof(1) >= 1 + trace(S)/lambda_max.  Returns
// nothing when the hypothesis fails.
std::optional<double> dof_lower_bound(const Matrix& S);

}  // namespace plsreg
