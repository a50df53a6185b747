#include "plsreg/pls.hpp"

#include <cmath>

#include "plsreg/errors.hpp"

namespace plsreg {

namespace {

// A component is degenerate when its score norm vanishes relative to the
// overall predictor scale: the Krylov space is exhausted.
constexpr double kDegenerateScoreRatio = 1e-10;

void check_m_max(const StandardizedData& data, int m_max) {
  const int cap = static_cast<int>(std::min<Index>(data.n() - 1, data.p()));
  if (m_max < 0 || m_max > cap)
    throw ComponentOutOfRange(m_max, "path length must lie in [0, min(n-1, p)]");
}

}  // namespace

namespace detail {

LanczosState run_lanczos_recursion(const Matrix& X, const Vector& y, int m_max) {
  const Index p = X.cols();
  const double norm_x = X.norm();
  const Vector u = X.transpose() * y;

  LanczosState state;
  state.beta_path = Matrix::Zero(p, m_max + 1);
  Vector beta = Vector::Zero(p);

  for (int i = 1; i <= m_max; ++i) {
    // Gradient of the residual sum of squares at the current coefficients.
    Vector w = u - X.transpose() * (X * beta);
    Vector z = X.transpose() * (X * w);

    // Orthogonalize against all previous pseudo-weights in the X^T X inner
    // product; skipping any term here loses the Lanczos three-term shortcut's
    // numerical escape hatch, so the full sum is always taken.
    Vector v = w;
    std::vector<double> proj_row(i - 1);
    for (int j = 0; j < i - 1; ++j) {
      proj_row[j] = state.g[j].dot(w);
      v -= state.vhat[j] * proj_row[j];
    }

    Vector tv = X * v;
    const double tnorm = tv.norm();
    if (!(tnorm > kDegenerateScoreRatio * norm_x)) {
      state.truncated_at = i;
      break;
    }

    Vector vhat = v / tnorm;
    Vector that = tv / tnorm;
    double a = that.dot(y);
    const bool flip = a < 0.0;
    if (flip) {
      vhat = -vhat;
      that = -that;
      a = -a;
    }

    beta += vhat * a;
    state.beta_path.col(i) = beta;
    state.vhat.push_back(std::move(vhat));
    state.that.push_back(std::move(that));
    state.g.push_back(X.transpose() * state.that.back());
    state.w.push_back(std::move(w));
    state.z.push_back(std::move(z));
    state.proj.push_back(std::move(proj_row));
    state.tnorm.push_back(tnorm);
    state.a.push_back(a);
    state.flipped.push_back(flip ? 1 : 0);
    state.m = i;
  }

  if (state.m < m_max) state.beta_path.conservativeResize(p, state.m + 1);
  return state;
}

}  // namespace detail

namespace {

PlsModel assemble_model(const StandardizedData& data, int m_max, Matrix T, Matrix V, Matrix W,
                        Matrix beta_path, std::optional<int> truncated_at) {
  PlsModel model;
  model.m_max = m_max;
  model.T = std::move(T);
  model.V = std::move(V);
  model.W = std::move(W);
  model.beta_path = std::move(beta_path);
  model.truncated_at = truncated_at;
  model.L = model.T.transpose() * (data.X * model.W);

  const int m = model.components();
  model.intercept_path.resize(m + 1);
  model.fitted_path.resize(data.n(), m + 1);
  for (int k = 0; k <= m; ++k) {
    AffineCoefficients orig = to_original_scale(data, model.beta_path.col(k));
    model.intercept_path(k) = orig.intercept;
    model.fitted_path.col(k) = (data.X * model.beta_path.col(k)).array() + data.y_bar;
  }
  return model;
}

}  // namespace

PlsModel fit_pls(const StandardizedData& data, int m_max) {
  check_m_max(data, m_max);
  detail::LanczosState state = detail::run_lanczos_recursion(data.X, data.y, m_max);

  const Index p = data.p();
  Matrix T(data.n(), state.m), V(p, state.m), W(p, state.m);
  for (int i = 0; i < state.m; ++i) {
    T.col(i) = state.that[i];
    V.col(i) = state.vhat[i];
    W.col(i) = state.w[i];
  }
  return assemble_model(data, m_max, std::move(T), std::move(V), std::move(W),
                        std::move(state.beta_path), state.truncated_at);
}

PlsModel fit_nipals_reference(const StandardizedData& data, int m_max) {
  check_m_max(data, m_max);
  const Index n = data.n();
  const Index p = data.p();
  const double norm_x = data.X.norm();
  const double y_norm = data.y.norm();

  Matrix Xd = data.X;  // deflated copy
  Matrix T(n, m_max), W(p, m_max);
  std::optional<int> truncated_at;

  int m = 0;
  for (int i = 1; i <= m_max; ++i) {
    Vector w = Xd.transpose() * data.y;
    const double wnorm = w.norm();
    if (!(wnorm > kDegenerateScoreRatio * norm_x * (y_norm > 0 ? y_norm : 1.0))) {
      truncated_at = i;
      break;
    }
    w /= wnorm;
    Vector t = Xd * w;
    const double tnorm = t.norm();
    if (!(tnorm > kDegenerateScoreRatio * norm_x)) {
      truncated_at = i;
      break;
    }
    t /= tnorm;
    if (t.dot(data.y) < 0.0) {
      t = -t;
      w = -w;
    }
    Vector loading = Xd.transpose() * t;
    Xd.noalias() -= t * loading.transpose();
    T.col(i - 1) = t;
    W.col(i - 1) = w;
    m = i;
  }
  T.conservativeResize(n, m);
  W.conservativeResize(p, m);

  // Coefficients from the weight/score factorization: with L = T^T X W,
  // beta_m = W_m L_m^{-1} T_m^T y reproduces the projection fit X beta = T T^T y.
  Matrix beta_path = Matrix::Zero(p, m + 1);
  const Matrix L_full = T.transpose() * (data.X * W);
  const Vector q = T.transpose() * data.y;
  for (int k = 1; k <= m; ++k) {
    Vector c = L_full.topLeftCorner(k, k).partialPivLu().solve(q.head(k));
    beta_path.col(k) = W.leftCols(k) * c;
  }

  Matrix V_pseudo(p, m);  // pseudo-weights mapping X directly onto scores
  for (int k = 0; k < m; ++k) {
    Vector c = L_full.topLeftCorner(k + 1, k + 1)
                   .partialPivLu()
                   .solve(Vector::Unit(k + 1, k));
    V_pseudo.col(k) = W.leftCols(k + 1) * c;
  }

  return assemble_model(data, m_max, std::move(T), std::move(V_pseudo), std::move(W),
                        std::move(beta_path), truncated_at);
}

AffineCoefficients coefficients_original_scale(const PlsModel& model, int m,
                                               const StandardizedData& data) {
  if (m < 0 || m > model.components()) throw ComponentOutOfRange(m);
  return to_original_scale(data, model.beta_path.col(m));
}

Vector predict(double intercept, const Vector& beta, const Matrix& X_new_raw) {
  if (X_new_raw.cols() != beta.size())
    throw DimensionMismatch("prediction rows have wrong number of predictors");
  return (X_new_raw * beta).array() + intercept;
}

}  // namespace plsreg
