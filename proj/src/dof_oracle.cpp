#include "plsreg/dof_oracle.hpp"

#include <cmath>
#include <vector>

#include "plsreg/errors.hpp"

namespace plsreg {

double fd_trace(const std::function<Vector(const Vector&)>& fit_fn, const Vector& y,
                const FdConfig& config) {
  const Index n = y.size();
  if (n < 1) throw DimensionTooSmall("response is empty");

  double eps = config.epsilon;
  if (eps == 0.0) eps = 1e-5 * (1.0 + y.cwiseAbs().maxCoeff());
  if (!(eps > 0.0)) throw InputError("step size must be positive");

  const Vector base = fit_fn(y);
  if (base.size() != n) throw DimensionMismatch("fit function changed the response length");
  const Vector replay = fit_fn(y);
  if (replay.size() != n || (replay - base).cwiseAbs().maxCoeff() != 0.0)
    throw NonDeterministicFit();

  // Diagonal entries are computed independently and summed in index order, so
  // the result does not depend on the parallel schedule.
  std::vector<double> diagonal(static_cast<std::size_t>(n));
  const bool central = config.scheme == FdConfig::Scheme::Central;
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    Vector pert = y;
    pert(i) += eps;
    const double up = fit_fn(pert)(i);
    if (central) {
      pert(i) = y(i) - eps;
      const double down = fit_fn(pert)(i);
      diagonal[static_cast<std::size_t>(i)] = (up - down) / (2.0 * eps);
    } else {
      diagonal[static_cast<std::size_t>(i)] = (up - base(i)) / eps;
    }
  }

  double trace = 0.0;
  for (Index i = 0; i < n; ++i) trace += diagonal[static_cast<std::size_t>(i)];
  return trace;
}

double closed_form_dof_one_component(const Matrix& S, const Vector& s) {
  if (S.rows() != S.cols()) throw DimensionMismatch("moment matrix must be square");
  if (s.size() != S.rows()) throw DimensionMismatch("moment vector has wrong length");
  const double ss = s.squaredNorm();
  const Vector Ss = S * s;
  const double sSs = s.dot(Ss);
  if (!(sSs > 0.0) || !(ss > 0.0)) throw ZeroGradient();
  const double sSSs = Ss.squaredNorm();  // s^T S^2 s
  return 3.0 + (ss / sSs) * (S.trace() - 2.0 * sSSs / sSs);
}

std::optional<double> dof_lower_bound(const Matrix& S) {
  if (S.rows() != S.cols()) throw DimensionMismatch("moment matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw EigFailure();
  const double lambda_max = eig.eigenvalues().maxCoeff();
  const double trace = S.trace();
  if (!(lambda_max > 0.0)) return std::nullopt;
  if (lambda_max > 0.5 * trace) return std::nullopt;
  return 1.0 + trace / lambda_max;
}

}  // namespace plsreg
