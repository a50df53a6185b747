#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace plsreg {

enum class DofMethod { Lanczos, Krylov, Naive };

// Why a complexity profile stopped before the requested number of components.
enum class TruncationReason {
  None,
  DegenerateComponent,  // the fit itself ran out of Krylov directions
  NegativeDof,          // the estimate went negative: later entries are invalid
  SingularBasis,        // the moment basis became numerically singular
};

// Degrees of freedom per path position m = 0, 1, ... as estimated by one
// engine.  truncated_at is the first index that is NOT valid; for
// NegativeDof the offending (negative) value is kept as the last entry so
// callers can observe it.
struct DofProfile {
  DofMethod method = DofMethod::Naive;
  std::vector<double> dof;
  std::optional<int> truncated_at;
  TruncationReason reason = TruncationReason::None;

  std::size_t valid_count() const {
    return truncated_at ? static_cast<std::size_t>(*truncated_at) : dof.size();
  }
};

std::string to_string(DofMethod method);
std::string to_string(TruncationReason reason);

// The trivial profile: m+1 parameters for the m-component model.
DofProfile dof_profile_naive(int m_max);

}  // namespace plsreg
