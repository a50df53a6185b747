#include "plsreg/dof_lanczos.hpp"

#include <algorithm>

#include "plsreg/errors.hpp"

namespace plsreg {

namespace {

// Column-block width of the parallel kernel.  The partition depends only on n,
// never on the thread count, and per-block partial traces are reduced in block
// order, so results are identical for any number of threads.
constexpr Index kBlockWidth = 64;

/*
 * Derivative propagation.
 *
 * The fit applies, per component i (with A = X^T X, u = X^T y, beta the
 * coefficients after i-1 components):
 *
 *   w   = u - A beta                          gradient step
 *   v   = w - sum_j vhat_j (g_j . w)          orthogonalization, g_j = X^T t_j
 *   vhat = v / ||X v||,  t_i = X vhat         normalization
 *   beta += vhat (t_i . y)                    update
 *
 * Differentiating with respect to y and writing dB = d beta / dy (p x n),
 * dVs_j = d vhat_j / dy:
 *
 *   dW  = X^T - A dB                                      = X^T (I - X dB)
 *   dV  = dW - sum_j [ (vhat_j . z) dVs_j
 *                      + vhat_j (z^T dVs_j + g_j^T dW) ]   with z = A w
 *   dVhat = (dV - vhat_i (g_i^T dV)) / ||X v||             (sign follows vhat_i)
 *   dB  += vhat_i (u^T dVhat + t_i^T) + (t_i . y) dVhat
 *
 * All quantities marked with hats come from the replayed fit state, so the
 * derivative follows exactly the path the fit took, including early stops.
 * The per-column independence of dB is what the blocked kernel exploits.
 */
struct Workspace {
  const Matrix& X;
  const Matrix& Xt;
  const Vector& u;
  const detail::LanczosState& state;
  const LanczosOptions& options;
  Matrix& DB;                 // p x n, evolving Jacobian
  std::vector<Matrix>& DVs;   // per-component pseudo-weight derivatives, p x n
  JacobianPath& path;         // output buffers (dBeta / hats preallocated)
  Matrix& partials;           // (m+1) x nblocks trace contributions
};

void propagate_columns(const Workspace& ws, Index c0, Index width, Index block) {
  const auto& st = ws.state;
  const Index n = ws.X.rows();
  auto DBb = ws.DB.middleCols(c0, width);

  for (int i = 1; i <= st.m; ++i) {
    const Vector& vhat = st.vhat[i - 1];
    const Vector& that = st.that[i - 1];
    const Vector& gi = st.g[i - 1];
    const Vector& zi = st.z[i - 1];
    const double a = st.a[i - 1];
    const double tnorm = st.tnorm[i - 1];

    Matrix XDB = ws.X * DBb;                                      // n x w
    Matrix DW = ws.Xt.middleCols(c0, width) - ws.Xt * XDB;        // p x w
    Matrix DV = DW;
    for (int j = 0; j < i - 1; ++j) {
      auto DVsj = ws.DVs[j].middleCols(c0, width);
      Eigen::RowVectorXd cross = zi.transpose() * DVsj;
      cross.noalias() += st.g[j].transpose() * DW;
      DV.noalias() -= st.vhat[j] * cross;
      DV.noalias() -= st.proj[i - 1][j] * DVsj;
    }

    Eigen::RowVectorXd along = gi.transpose() * DV;
    Matrix DVhat = (DV - vhat * along) / tnorm;
    if (st.flipped[i - 1]) DVhat = -DVhat;

    Eigen::RowVectorXd du = ws.u.transpose() * DVhat;
    du += that.segment(c0, width).transpose();
    DBb.noalias() += vhat * du;
    DBb.noalias() += a * DVhat;
    ws.DVs[i - 1].middleCols(c0, width) = DVhat;

    ws.partials(i, block) =
        ws.Xt.middleCols(c0, width).cwiseProduct(DBb).sum();
    if (ws.options.retain_jacobians) ws.path.dBeta[i].middleCols(c0, width) = DBb;
    if (ws.options.retain_hats)
      ws.path.hats[i].middleCols(c0, width) =
          ((ws.X * DBb).array() + 1.0 / static_cast<double>(n)).matrix();
  }
}

}  // namespace

JacobianPath dof_lanczos(const StandardizedData& data, int m_max, const LanczosOptions& options) {
  detail::LanczosState state = detail::run_lanczos_recursion(data.X, data.y, m_max);
  const Index n = data.n();
  const Index p = data.p();
  const int m = state.m;

  JacobianPath path;
  path.X = data.X;
  path.dof.assign(static_cast<std::size_t>(m) + 1, 0.0);
  path.dof[0] = 1.0;  // the mean model estimates exactly one parameter
  if (options.retain_jacobians) {
    path.dBeta.resize(m + 1);
    for (int i = 0; i <= m; ++i) path.dBeta[i].setZero(p, n);
  }
  if (options.retain_hats) {
    path.hats.resize(m + 1);
    path.hats[0] = Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
    for (int i = 1; i <= m; ++i) path.hats[i].resize(n, n);
  }

  const Matrix Xt = data.X.transpose();
  const Vector u = Xt * data.y;
  Matrix DB = Matrix::Zero(p, n);
  std::vector<Matrix> DVs(m);
  for (auto& d : DVs) d.resize(p, n);

  const Index nblocks = std::max<Index>(1, (n + kBlockWidth - 1) / kBlockWidth);
  Matrix partials = Matrix::Zero(m + 1, nblocks);
  Workspace ws{data.X, Xt, u, state, options, DB, DVs, path, partials};

  if (options.kernel == Kernel::Blocked) {
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < nblocks; ++b) {
      const Index c0 = b * kBlockWidth;
      propagate_columns(ws, c0, std::min(kBlockWidth, n - c0), b);
    }
  } else {
    propagate_columns(ws, 0, n, 0);
    // A single block spanning all columns: identical formulas, no partition.
    for (Index b = 1; b < nblocks; ++b) partials.col(b).setZero();
  }

  // Fixed-order reduction of the per-block trace contributions.
  for (int i = 1; i <= m; ++i) {
    double trace = 0.0;
    for (Index b = 0; b < nblocks; ++b) trace += partials(i, b);
    path.dof[static_cast<std::size_t>(i)] = 1.0 + trace;
  }

  if (state.truncated_at) {
    path.truncated_at = *state.truncated_at;
    path.reason = TruncationReason::DegenerateComponent;
  }
  for (int i = 1; i <= m; ++i) {
    if (path.dof[static_cast<std::size_t>(i)] < 0.0) {
      // Negative estimate: keep the offending entry, drop everything after.
      path.dof.resize(static_cast<std::size_t>(i) + 1);
      if (options.retain_jacobians) path.dBeta.resize(i + 1);
      if (options.retain_hats) path.hats.resize(i + 1);
      path.truncated_at = i;
      path.reason = TruncationReason::NegativeDof;
      break;
    }
  }
  return path;
}

DofProfile dof_profile_lanczos(const StandardizedData& data, int m_max,
                               const LanczosOptions& options) {
  JacobianPath path = dof_lanczos(data, m_max, options);
  DofProfile profile;
  profile.method = DofMethod::Lanczos;
  profile.dof = path.dof;
  profile.truncated_at = path.truncated_at;
  profile.reason = path.reason;
  return profile;
}

Matrix approximate_hat_matrix(const JacobianPath& path, int m) {
  if (m < 0 || static_cast<std::size_t>(m) >= path.dof.size()) throw ComponentOutOfRange(m);
  if (static_cast<std::size_t>(m) < path.hats.size()) return path.hats[static_cast<std::size_t>(m)];
  if (path.dBeta.empty()) throw JacobiansNotRetained();
  const Index n = path.n();
  Matrix H = path.X * path.dBeta[static_cast<std::size_t>(m)];
  H.array() += 1.0 / static_cast<double>(n);
  return H;
}

Matrix coefficient_covariance(const JacobianPath& path, int m, double sigma_hat) {
  if (m < 0 || static_cast<std::size_t>(m) >= path.dof.size()) throw ComponentOutOfRange(m);
  if (path.dBeta.empty()) throw JacobiansNotRetained();
  if (sigma_hat < 0.0) throw InputError("sigma must be nonnegative");
  const Matrix& J = path.dBeta[static_cast<std::size_t>(m)];
  Matrix C = (sigma_hat * sigma_hat) * (J * J.transpose());
  return 0.5 * (C + C.transpose());
}

}  // namespace plsreg
