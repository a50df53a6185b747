#include "plsreg/dof_profile.hpp"

namespace plsreg {

std::string to_string(DofMethod method) {
  switch (method) {
    case DofMethod::Lanczos: return "lanczos";
    case DofMethod::Krylov: return "krylov";
    case DofMethod::Naive: return "naive";
  }
  return "unknown";
}

std::string to_string(TruncationReason reason) {
  switch (reason) {
    case TruncationReason::None: return "none";
    case TruncationReason::DegenerateComponent: return "degenerate-component";
    case TruncationReason::NegativeDof: return "negative-dof";
    case TruncationReason::SingularBasis: return "singular-basis";
  }
  return "unknown";
}

DofProfile dof_profile_naive(int m_max) {
  DofProfile profile;
  profile.method = DofMethod::Naive;
  profile.dof.resize(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) profile.dof[static_cast<std::size_t>(m)] = m + 1.0;
  return profile;
}

}  // namespace plsreg
