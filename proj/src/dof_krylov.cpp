#include "plsreg/dof_krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "plsreg/errors.hpp"

namespace plsreg {

namespace {

constexpr double kConditionLimit = 1e12;

// The moment matrix is legitimately ill conditioned well before the 1e12
// gate (its columns are nearly collinear powers of the kernel), and the
// formula below cancels large terms against each other.  Both effects lose
// about cond(B) * eps of the answer, so the whole engine computes in extended
// precision and rounds only the stored results; this keeps the estimate
// within ~1e-8 of the exact value everywhere the condition gate admits.
using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Kernel quantities shared by every path position: K, its eigenvalues, and
// the iterated powers K^j y.
struct ExtendedKernel {
  LongMatrix K;
  LongVector eigenvalues;
  std::vector<LongVector> powers_y;
  LongVector y;
};

ExtendedKernel extend_kernel(const Matrix& K, const Vector& y, int m) {
  ExtendedKernel ext;
  ext.K = K.cast<long double>();
  ext.y = y.cast<long double>();
  Eigen::SelfAdjointEigenSolver<LongMatrix> eig(ext.K, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw EigFailure();
  ext.eigenvalues = eig.eigenvalues();
  ext.powers_y.reserve(static_cast<std::size_t>(m));
  LongVector current = ext.y;
  for (int j = 1; j <= m; ++j) {
    current = ext.K * current;
    ext.powers_y.push_back(current);
  }
  return ext;
}

LongVector power_traces(const ExtendedKernel& ext, int m) {
  LongVector traces(m);
  LongVector powered = LongVector::Ones(ext.eigenvalues.size());
  for (int j = 1; j <= m; ++j) {
    powered = powered.cwiseProduct(ext.eigenvalues);
    traces(j - 1) = powered.sum();
  }
  return traces;
}

// Extended-precision working set for one path position, rounded into the
// public basis struct at the end of the build.
struct ExtendedBasis {
  LongMatrix T;
  LongVector c;
  LongMatrix V;
  LongVector traces;
};

ExtendedBasis solve_basis(const Matrix& T, const ExtendedKernel& ext, int m,
                          KrylovBasis& out) {
  ExtendedBasis work;
  work.T = T.leftCols(m).cast<long double>();
  work.traces = power_traces(ext, m);

  LongMatrix B(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      B(i, j) = work.T.col(i).dot(ext.powers_y[static_cast<std::size_t>(j)]);

  // The columns of B scale like the powers of K; equilibrate before judging
  // conditioning so that geometric growth alone does not look singular.
  LongVector col_scale(m);
  for (int j = 0; j < m; ++j) {
    col_scale(j) = B.col(j).norm();
    if (!(col_scale(j) > 0.0L))
      throw SingularBasis(m, std::numeric_limits<double>::infinity());
  }
  LongMatrix Bt = B * col_scale.cwiseInverse().asDiagonal();

  Eigen::JacobiSVD<LongMatrix> svd(Bt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const long double smax = svd.singularValues()(0);
  const long double smin = svd.singularValues()(m - 1);
  if (!(smin > 0.0L)) throw SingularBasis(m, std::numeric_limits<double>::infinity());
  const double condition = static_cast<double>(smax / smin);
  if (condition > kConditionLimit) throw SingularBasis(m, condition);

  LongMatrix Bt_inv = svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
                      svd.matrixU().transpose();
  LongMatrix B_inv = col_scale.cwiseInverse().asDiagonal() * Bt_inv;
  work.c = B_inv * (work.T.transpose() * ext.y);
  work.V = work.T * B_inv.transpose();

  out.condition = condition;
  out.B = B.cast<double>();
  out.c = work.c.cast<double>();
  out.V = work.V.cast<double>();
  return work;
}

double evaluate_dof(const ExtendedBasis& work, const ExtendedKernel& ext, int m) {
  const LongVector residual = ext.y - work.T * (work.T.transpose() * ext.y);

  long double power_trace = 0.0L;
  for (int j = 1; j <= m; ++j) power_trace += work.c(j - 1) * work.traces(j - 1);

  // sum_{j,l} c_j t_l . K^j t_l via iterated kernel products per component.
  long double projected = 0.0L;
  for (int l = 0; l < m; ++l) {
    LongVector u = work.T.col(l);
    for (int j = 1; j <= m; ++j) {
      u = ext.K * u;
      projected += work.c(j - 1) * work.T.col(l).dot(u);
    }
  }

  long double residual_term = 0.0L;
  LongVector kr = residual;
  for (int j = 1; j <= m; ++j) {
    kr = ext.K * kr;
    residual_term += kr.dot(work.V.col(j - 1));
  }

  return static_cast<double>(1.0L + power_trace - projected + residual_term +
                             static_cast<long double>(m));
}

KrylovBasis build_basis(const Matrix& T, const Matrix& K, const ExtendedKernel& ext, int m) {
  KrylovBasis basis;
  basis.m = m;
  basis.K = K;
  if (m == 0) {
    basis.B.resize(0, 0);
    basis.c.resize(0);
    basis.V.resize(ext.y.size(), 0);
    basis.trace_K_powers.resize(0);
    return basis;
  }
  ExtendedBasis work = solve_basis(T, ext, m, basis);
  basis.trace_K_powers = work.traces.cast<double>();
  basis.K_powers_y.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    basis.K_powers_y.push_back(ext.powers_y[static_cast<std::size_t>(j)].cast<double>());
  return basis;
}

void check_kernel(const PlsModel& model, const Matrix& K, const Vector& y, int m) {
  if (m < 0 || m > model.components())
    throw ComponentOutOfRange(m, "basis size exceeds fitted components");
  if (K.rows() != K.cols() || K.rows() != y.size())
    throw DimensionMismatch("kernel and response sizes differ");
}

}  // namespace

Vector kernel_power_traces(const Matrix& K, int m) {
  if (K.rows() != K.cols()) throw DimensionMismatch("kernel must be square");
  if (m < 0) throw ComponentOutOfRange(m);
  if (m == 0) return Vector(0);
  Eigen::SelfAdjointEigenSolver<LongMatrix> eig(K.cast<long double>(),
                                                Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw EigFailure();
  LongVector powered = LongVector::Ones(K.rows());
  Vector traces(m);
  for (int j = 1; j <= m; ++j) {
    powered = powered.cwiseProduct(eig.eigenvalues());
    traces(j - 1) = static_cast<double>(powered.sum());
  }
  return traces;
}

KrylovBasis krylov_basis(const PlsModel& model, const Matrix& K, const Vector& y, int m) {
  check_kernel(model, K, y, m);
  return build_basis(model.T, K, extend_kernel(K, y, m), m);
}

double dof_krylov(const KrylovBasis& basis, const PlsModel& model, const Vector& y) {
  const int m = basis.m;
  if (m == 0) return 1.0;
  if (model.components() < m) throw ComponentOutOfRange(m, "model has fewer components");

  // Rebuild the extended-precision working set from the stored kernel; the
  // rounded c/V in the struct are for inspection, not for the estimate.
  ExtendedKernel ext = extend_kernel(basis.K, y, m);
  KrylovBasis scratch;
  ExtendedBasis work = solve_basis(model.T, ext, m, scratch);
  return evaluate_dof(work, ext, m);
}

Matrix jacobian_krylov(const KrylovBasis& basis, const PlsModel& model, const Vector& y) {
  const Index n = y.size();
  const int m = basis.m;
  Matrix H = Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  if (m == 0) return H;
  if (model.components() < m) throw ComponentOutOfRange(m, "model has fewer components");

  ExtendedKernel ext = extend_kernel(basis.K, y, m);
  KrylovBasis scratch;
  ExtendedBasis work = solve_basis(model.T, ext, m, scratch);

  const LongMatrix P = work.T * work.T.transpose();
  const LongVector residual = ext.y - work.T * (work.T.transpose() * ext.y);

  LongMatrix Hl = P + LongMatrix::Constant(n, n, 1.0L / static_cast<long double>(n));
  LongMatrix Kj = LongMatrix::Identity(n, n);
  LongVector kr = residual;
  for (int j = 1; j <= m; ++j) {
    Kj = ext.K * Kj;
    kr = ext.K * kr;
    Hl += work.c(j - 1) * (Kj - P * Kj);
    Hl += work.V.col(j - 1) * kr.transpose();
  }
  return Hl.cast<double>();
}

DofProfile dof_profile_krylov(const StandardizedData& data, const PlsModel& model, int m_max) {
  if (m_max < 0) throw ComponentOutOfRange(m_max);
  if (model.T.rows() != data.n()) throw DimensionMismatch("model and data sizes differ");
  const int cap = std::min(m_max, model.components());

  DofProfile profile;
  profile.method = DofMethod::Krylov;
  profile.dof.push_back(1.0);

  const Matrix K = data.X * data.X.transpose();
  const ExtendedKernel ext = extend_kernel(K, data.y, cap);

  for (int m = 1; m <= cap; ++m) {
    double value = 0.0;
    try {
      KrylovBasis scratch;
      ExtendedBasis work = solve_basis(model.T, ext, m, scratch);
      value = evaluate_dof(work, ext, m);
    } catch (const SingularBasis&) {
      profile.truncated_at = m;
      profile.reason = TruncationReason::SingularBasis;
      return profile;
    }
    profile.dof.push_back(value);
    if (value < 0.0) {
      profile.truncated_at = m;
      profile.reason = TruncationReason::NegativeDof;
      return profile;
    }
  }

  if (cap < m_max) {
    // The fit itself stopped early; everything past its last component is out
    // of reach for any engine.
    profile.truncated_at = cap + 1;
    profile.reason = TruncationReason::DegenerateComponent;
  }
  return profile;
}

}  // namespace plsreg
