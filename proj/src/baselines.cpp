#include "plsreg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plsreg/errors.hpp"

namespace plsreg {

namespace {

// Rank tolerance relative to the largest eigenvalue / singular value.
double spectral_tolerance(Index n, Index p, double largest) {
  return static_cast<double>(std::max(n, p)) * std::numeric_limits<double>::epsilon() * largest;
}

}  // namespace

RidgeModel fit_ridge(const StandardizedData& data, double lambda) {
  if (lambda < 0.0) throw InputError("ridge penalty must be nonnegative");
  const Matrix A = data.X.transpose() * data.X;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
  if (eig.info() != Eigen::Success) throw EigFailure();
  const Vector& d = eig.eigenvalues();
  const double d_max = d.maxCoeff();
  const double tol = spectral_tolerance(data.n(), data.p(), d_max);

  RidgeModel model;
  model.lambda = lambda;
  model.dof = 1.0;

  const Vector proj = eig.eigenvectors().transpose() * (data.X.transpose() * data.y);
  Vector scaled(d.size());
  for (Index i = 0; i < d.size(); ++i) {
    const bool effectively_zero = d(i) <= tol;
    if (lambda == 0.0) {
      if (effectively_zero) throw SingularSystem("X^T X is singular and the penalty is zero");
      scaled(i) = proj(i) / d(i);
      model.dof += 1.0;
    } else {
      scaled(i) = effectively_zero ? 0.0 : proj(i) / (d(i) + lambda);
      model.dof += effectively_zero ? 0.0 : d(i) / (d(i) + lambda);
    }
  }
  model.beta = eig.eigenvectors() * scaled;
  AffineCoefficients orig = to_original_scale(data, model.beta);
  model.intercept = orig.intercept;
  model.fitted = (data.X * model.beta).array() + data.y_bar;
  return model;
}

PcrModel fit_pcr(const StandardizedData& data, int m_max) {
  if (m_max < 0) throw ComponentOutOfRange(m_max);
  const Index n = data.n();
  const Index p = data.p();
  const Matrix S = (data.X.transpose() * data.X) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  if (eig.info() != Eigen::Success) throw EigFailure();

  // Descending eigenvalues; ties keep the solver's (deterministic) order.
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return eig.eigenvalues()(a) > eig.eigenvalues()(b);
  });

  const double tol = spectral_tolerance(n, p, std::max(0.0, eig.eigenvalues().maxCoeff()));
  Index rank = 0;
  for (Index j = 0; j < p; ++j)
    if (eig.eigenvalues()(order[static_cast<std::size_t>(j)]) > tol) ++rank;
  if (m_max > rank)
    throw RankExceeded("requested " + std::to_string(m_max) + " components from rank " +
                       std::to_string(rank));

  PcrModel model;
  model.m_max = m_max;
  model.directions.resize(p, m_max);
  model.eigenvalues.resize(m_max);
  model.beta_path = Matrix::Zero(p, m_max + 1);
  model.fitted_path.resize(n, m_max + 1);
  model.fitted_path.col(0).setConstant(data.y_bar);

  Vector beta = Vector::Zero(p);
  for (int m = 1; m <= m_max; ++m) {
    const Index idx = order[static_cast<std::size_t>(m - 1)];
    const Vector q = eig.eigenvectors().col(idx);
    const Vector score = data.X * q;
    // Scores of distinct principal directions are orthogonal, so each
    // coefficient is a one-dimensional projection.
    beta += q * (score.dot(data.y) / score.squaredNorm());
    model.directions.col(m - 1) = q;
    model.eigenvalues(m - 1) = eig.eigenvalues()(idx);
    model.beta_path.col(m) = beta;
    model.fitted_path.col(m) = (data.X * beta).array() + data.y_bar;
  }
  return model;
}

OlsFit fit_ols(const StandardizedData& data) {
  Eigen::JacobiSVD<Matrix> svd(data.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double tol = spectral_tolerance(data.n(), data.p(), sv.size() > 0 ? sv(0) : 0.0);

  OlsFit fit;
  fit.rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++fit.rank;
  fit.used_pseudoinverse = fit.rank < std::min(data.n(), data.p());

  Vector inv_sv = Vector::Zero(sv.size());
  for (Index i = 0; i < fit.rank; ++i) inv_sv(i) = 1.0 / sv(i);
  fit.beta = svd.matrixV() * inv_sv.asDiagonal() * (svd.matrixU().transpose() * data.y);
  const auto U_r = svd.matrixU().leftCols(fit.rank);
  fit.hat = U_r * U_r.transpose();
  fit.fitted = (data.X * fit.beta).array() + data.y_bar;
  return fit;
}

double approximation_error(const Vector& y_fit_a, const Vector& y_fit_b) {
  if (y_fit_a.size() != y_fit_b.size())
    throw DimensionMismatch("fitted-value vectors differ in length");
  if (y_fit_a.size() == 0) throw DimensionTooSmall("fitted-value vectors are empty");
  return (y_fit_a - y_fit_b).squaredNorm() / static_cast<double>(y_fit_a.size());
}

}  // namespace plsreg
