#include <cmath>

#include "doctest.h"
#include "plsreg/baselines.hpp"
#include "plsreg/dof_lanczos.hpp"
#include "plsreg/errors.hpp"
#include "support/instances.hpp"

using namespace plsreg;
using testsupport::random_dataset;
using testsupport::random_standardized;

namespace {

double max_abs(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("the zero-component model always has exactly one degree of freedom") {
  Philox rng(404, 0);
  StandardizedData data = random_standardized(rng, 12, 5);
  JacobianPath path = dof_lanczos(data, 3);
  CHECK(path.dof[0] == 1.0);
}

TEST_CASE("the full-rank path saturates at rank + 1") {
  Philox rng(405, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 10 + static_cast<Index>(rng.below(20));
    const Index p = 2 + static_cast<Index>(rng.below(6));
    StandardizedData data = random_standardized(rng, n, p);
    JacobianPath path = dof_lanczos(data, static_cast<int>(p));
    REQUIRE(path.dof.size() == static_cast<std::size_t>(p) + 1);
    CHECK(std::abs(path.dof.back() - (static_cast<double>(p) + 1.0)) < 1e-6);
  }
}

TEST_CASE("blocked and reference kernels produce the same derivatives") {
  Philox rng(406, 0);
  // n = 150 spans three column blocks of the parallel kernel.
  StandardizedData data = random_standardized(rng, 150, 10, 0.5);
  LanczosOptions blocked;
  blocked.retain_jacobians = true;
  LanczosOptions reference = blocked;
  reference.kernel = Kernel::Reference;
  JacobianPath a = dof_lanczos(data, 6, blocked);
  JacobianPath b = dof_lanczos(data, 6, reference);
  REQUIRE(a.dof.size() == b.dof.size());
  for (std::size_t m = 0; m < a.dof.size(); ++m)
    CHECK(std::abs(a.dof[m] - b.dof[m]) < 1e-10);
  for (std::size_t m = 0; m < a.dBeta.size(); ++m)
    CHECK(max_abs(a.dBeta[m] - b.dBeta[m]) < 1e-12);
}

TEST_CASE("influence matrix: rows sum to one and the trace is the complexity") {
  Philox rng(407, 0);
  StandardizedData data = random_standardized(rng, 14, 6, 0.3);
  LanczosOptions options;
  options.retain_jacobians = true;
  JacobianPath path = dof_lanczos(data, 4, options);
  for (int m = 0; m <= 4; ++m) {
    Matrix H = approximate_hat_matrix(path, m);
    CHECK(max_abs(H.rowwise().sum() - Vector::Ones(14)) < 1e-12);
    CHECK(std::abs(H.trace() - path.dof[static_cast<std::size_t>(m)]) < 1e-10);
  }
}

TEST_CASE("influence matrix endpoints: mean model and least squares") {
  Philox rng(408, 0);
  const Index n = 13, p = 4;
  StandardizedData data = random_standardized(rng, n, p);
  LanczosOptions options;
  options.retain_jacobians = true;
  JacobianPath path = dof_lanczos(data, static_cast<int>(p), options);

  Matrix H0 = approximate_hat_matrix(path, 0);
  CHECK(max_abs(H0 - Matrix::Constant(n, n, 1.0 / static_cast<double>(n))) < 1e-14);

  OlsFit ols = fit_ols(data);
  Matrix H_full = Matrix::Constant(n, n, 1.0 / static_cast<double>(n)) + ols.hat;
  CHECK(max_abs(approximate_hat_matrix(path, static_cast<int>(p)) - H_full) < 1e-6);
}

TEST_CASE("retained hats equal hats rebuilt from retained jacobians") {
  Philox rng(409, 0);
  StandardizedData data = random_standardized(rng, 11, 3);
  LanczosOptions options;
  options.retain_jacobians = true;
  options.retain_hats = true;
  JacobianPath path = dof_lanczos(data, 2, options);
  REQUIRE(path.hats.size() == 3);
  for (int m = 0; m <= 2; ++m)
    CHECK(max_abs(path.hats[static_cast<std::size_t>(m)] - approximate_hat_matrix(path, m)) <
          1e-13);
}

TEST_CASE("asking for jacobian products without retaining them is an error") {
  Philox rng(410, 0);
  StandardizedData data = random_standardized(rng, 9, 3);
  JacobianPath path = dof_lanczos(data, 2);
  CHECK_THROWS_AS(approximate_hat_matrix(path, 1), JacobiansNotRetained);
  CHECK_THROWS_AS(coefficient_covariance(path, 1, 1.0), JacobiansNotRetained);
  CHECK_THROWS_AS([&] {
    LanczosOptions options;
    options.retain_jacobians = true;
    JacobianPath kept = dof_lanczos(data, 2, options);
    return approximate_hat_matrix(kept, 3);  // beyond the computed path
  }(), InputError);
}

TEST_CASE("coefficient covariance scales with sigma^2 and matches least squares") {
  Philox rng(411, 0);
  const Index n = 18, p = 5;
  StandardizedData data = random_standardized(rng, n, p);
  LanczosOptions options;
  options.retain_jacobians = true;
  JacobianPath path = dof_lanczos(data, static_cast<int>(p), options);

  CHECK(max_abs(coefficient_covariance(path, 2, 0.0)) == 0.0);

  Matrix one = coefficient_covariance(path, 2, 1.3);
  Matrix two = coefficient_covariance(path, 2, 2.6);
  CHECK(max_abs(two - 4.0 * one) < 1e-12 * max_abs(two));

  // At the full-rank endpoint the map is linear: sigma^2 (X^T X)^{-1}.
  Matrix expected = 1.7 * 1.7 * (data.X.transpose() * data.X).inverse();
  CHECK(max_abs(coefficient_covariance(path, static_cast<int>(p), 1.7) - expected) <
        1e-6 * max_abs(expected));
}

TEST_CASE("complexity path is invariant under response scaling") {
  Philox rng(412, 0);
  StandardizedData data = random_standardized(rng, 16, 6, 0.6);
  StandardizedData scaled = data;
  scaled.y *= 3.0;
  JacobianPath a = dof_lanczos(data, 5);
  JacobianPath b = dof_lanczos(scaled, 5);
  REQUIRE(a.dof.size() == b.dof.size());
  for (std::size_t m = 0; m < a.dof.size(); ++m)
    CHECK(std::abs(a.dof[m] - b.dof[m]) < 1e-9);
}

TEST_CASE("a rank-one design truncates the derivative path with the fit") {
  Philox rng(413, 0);
  StandardizedData data;
  Vector base = testsupport::random_vector(rng, 10);
  base.array() -= base.mean();
  data.X = base * Eigen::RowVectorXd::Ones(3);
  data.y = 2.0 * base + 0.1 * testsupport::random_vector(rng, 10);
  data.y.array() -= data.y.mean();
  data.x_bar = Vector::Zero(3);
  data.s_x = Vector::Ones(3);
  data.y_bar = 0.0;

  JacobianPath path = dof_lanczos(data, 3);
  REQUIRE(path.truncated_at.has_value());
  CHECK(*path.truncated_at == 2);
  CHECK(path.reason == TruncationReason::DegenerateComponent);
  REQUIRE(path.dof.size() == 2);
  CHECK(std::abs(path.dof[1] - 2.0) < 1e-6);  // projection on one direction + mean
}

TEST_CASE("profile wrapper mirrors the jacobian path") {
  Philox rng(414, 0);
  StandardizedData data = random_standardized(rng, 12, 4);
  JacobianPath path = dof_lanczos(data, 3);
  DofProfile profile = dof_profile_lanczos(data, 3);
  CHECK(profile.method == DofMethod::Lanczos);
  REQUIRE(profile.dof.size() == path.dof.size());
  for (std::size_t m = 0; m < path.dof.size(); ++m) CHECK(profile.dof[m] == path.dof[m]);
}
