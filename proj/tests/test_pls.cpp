#include <cmath>

#include "doctest.h"
#include "plsreg/errors.hpp"
#include "plsreg/pls.hpp"
#include "support/instances.hpp"

using namespace plsreg;
using testsupport::identity_moment_design;
using testsupport::random_dataset;
using testsupport::random_standardized;

TEST_CASE("zero components is the mean model") {
  Philox rng(1, 1);
  StandardizedData data = random_standardized(rng, 9, 3);
  PlsModel model = fit_pls(data, 0);
  CHECK(model.components() == 0);
  CHECK(model.beta_path.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((model.fitted_path.col(0).array() - data.y_bar).abs().maxCoeff() < 1e-12);
}

TEST_CASE("identity moment structure gives the covariance vector as first step") {
  Philox rng(3, 9);
  StandardizedData data = identity_moment_design(rng, 12, 4);
  const Vector s = data.X.transpose() * data.y / static_cast<double>(data.n() - 1);
  PlsModel model = fit_pls(data, 1);
  CHECK((model.beta_path.col(1) - s).cwiseAbs().maxCoeff() < 1e-10);
  Vector expected_fit = (data.X * s).array() + data.y_bar;
  CHECK((model.fitted_path.col(1) - expected_fit).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("a full path reproduces the least-squares fit") {
  Philox rng(21, 0);
  StandardizedData data = random_standardized(rng, 12, 4);
  PlsModel model = fit_pls(data, 4);
  REQUIRE(model.components() == 4);
  // Normal-equations oracle.
  Vector beta_ols =
      (data.X.transpose() * data.X).ldlt().solve(data.X.transpose() * data.y);
  CHECK((model.beta_path.col(4) - beta_ols).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("weight recursion and deflation produce the same fitted path") {
  Philox rng(17, 2);
  for (int trial = 0; trial < 8; ++trial) {
    const Index n = 8 + static_cast<Index>(rng.below(10));
    const Index p = 2 + static_cast<Index>(rng.below(6));
    const int m = static_cast<int>(
        1 + rng.below(static_cast<std::uint64_t>(std::min<Index>(n - 1, p))));
    StandardizedData data = random_standardized(rng, n, p, trial % 2 ? 0.6 : 0.0);
    PlsModel a = fit_pls(data, m);
    PlsModel b = fit_nipals_reference(data, m);
    REQUIRE(a.components() == b.components());
    CHECK((a.fitted_path - b.fitted_path).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((a.beta_path - b.beta_path).cwiseAbs().maxCoeff() < 1e-8);
    // Latent components agree up to sign, and the sign convention fixes it.
    CHECK((a.T - b.T).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("the first weight vector is the predictor-response covariance direction") {
  Philox rng(44, 1);
  StandardizedData data = random_standardized(rng, 10, 3);
  const Vector u = data.X.transpose() * data.y;
  PlsModel model = fit_pls(data, 1);
  const Vector w = model.W.col(0);
  const double cosine = std::abs(w.dot(u)) / (w.norm() * u.norm());
  CHECK(cosine == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rank-one designs stop after one component in both algorithms") {
  RawDataset raw;
  raw.X.resize(6, 3);
  Vector base(6);
  base << 1, 4, 2, 8, 5, 7;
  raw.X.col(0) = base;
  raw.X.col(1) = 2.0 * base;
  raw.X.col(2) = -0.5 * base;
  Philox rng(5, 5);
  raw.y = testsupport::random_vector(rng, 6);
  StandardizedData data = standardize(raw);

  PlsModel a = fit_pls(data, 2);
  CHECK(a.components() == 1);
  REQUIRE(a.truncated_at.has_value());
  CHECK(*a.truncated_at == 2);

  PlsModel b = fit_nipals_reference(data, 2);
  CHECK(b.components() == 1);
  REQUIRE(b.truncated_at.has_value());
  CHECK(*b.truncated_at == 2);
}

TEST_CASE("a constant response yields an empty component path") {
  Philox rng(6, 6);
  StandardizedData data = random_standardized(rng, 8, 3);
  data.y.setZero();
  PlsModel model = fit_pls(data, 2);
  CHECK(model.components() == 0);
  REQUIRE(model.truncated_at.has_value());
  CHECK(*model.truncated_at == 1);
}

TEST_CASE("structural invariants of the fitted path") {
  Philox rng(70, 3);
  for (int trial = 0; trial < 6; ++trial) {
    const Index n = 10 + static_cast<Index>(rng.below(20));
    const Index p = 3 + static_cast<Index>(rng.below(8));
    const int m = static_cast<int>(
        1 + rng.below(static_cast<std::uint64_t>(std::min<Index>(n - 1, p))));
    StandardizedData data = random_standardized(rng, n, p, 0.3);
    PlsModel model = fit_pls(data, m);
    const int mc = model.components();
    REQUIRE(mc >= 1);

    // Orthonormal latent components generated by the pseudo-weights.
    CHECK((model.T.transpose() * model.T - Matrix::Identity(mc, mc)).cwiseAbs().maxCoeff() <
          1e-8);
    CHECK((model.T - data.X * model.V).cwiseAbs().maxCoeff() < 1e-8);

    // Raw weight vectors are mutually orthogonal.
    for (int i = 0; i < mc; ++i)
      for (int j = i + 1; j < mc; ++j) {
        const double cross = std::abs(model.W.col(i).dot(model.W.col(j)));
        CHECK(cross < 1e-8 * model.W.col(i).norm() * model.W.col(j).norm());
      }

    // The coupling matrix is upper bidiagonal.
    const double scale = model.L.cwiseAbs().maxCoeff();
    for (int i = 0; i < mc; ++i)
      for (int j = 0; j < mc; ++j)
        if (i > j || j > i + 1) CHECK(std::abs(model.L(i, j)) < 1e-8 * scale);

    // Fitted values are the projection onto the latent components...
    Vector target = model.T * (model.T.transpose() * data.y);
    target.array() += data.y_bar;
    CHECK((model.fitted_path.col(mc) - target).cwiseAbs().maxCoeff() < 1e-8);

    // ...so residuals are orthogonal to used components and the error shrinks.
    double prev_rss = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= mc; ++k) {
      const Vector residual = data.y - data.X * model.beta_path.col(k);
      const double rss = residual.squaredNorm();
      CHECK(rss <= prev_rss + 1e-10);
      prev_rss = rss;
      for (int i = 0; i < k; ++i) CHECK(std::abs(residual.dot(model.T.col(i))) < 1e-7);
    }

    // Positive-correlation sign convention.
    for (int i = 0; i < mc; ++i) CHECK(model.T.col(i).dot(data.y) >= -1e-12);
  }
}

TEST_CASE("response scaling scales the coefficient path") {
  Philox rng(81, 0);
  StandardizedData data = random_standardized(rng, 11, 4);
  StandardizedData scaled = data;
  scaled.y *= 3.0;
  PlsModel a = fit_pls(data, 3);
  PlsModel b = fit_pls(scaled, 3);
  CHECK((a.T - b.T).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((3.0 * a.beta_path - b.beta_path).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("original-scale coefficients reproduce the fitted values") {
  Philox rng(12, 8);
  RawDataset raw = random_dataset(rng, 8, 3);
  StandardizedData data = standardize(raw);
  PlsModel model = fit_pls(data, 2);
  for (int m = 0; m <= model.components(); ++m) {
    AffineCoefficients coef = coefficients_original_scale(model, m, data);
    Vector pred = predict(coef.intercept, coef.beta, raw.X);
    CHECK((pred - model.fitted_path.col(m)).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK(coefficients_original_scale(model, 0, data).beta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(coefficients_original_scale(model, 0, data).intercept == doctest::Approx(data.y_bar));
  CHECK_THROWS_AS(coefficients_original_scale(model, 5, data), ComponentOutOfRange);
}

TEST_CASE("prediction validates dimensions") {
  Vector beta(3);
  beta << 1, 2, 3;
  CHECK_THROWS_AS(predict(0.0, beta, Matrix::Zero(4, 2)), DimensionMismatch);
  Matrix X = Matrix::Zero(2, 3);
  Vector out = predict(7.0, beta, X);
  CHECK(out(0) == doctest::Approx(7.0));
}

TEST_CASE("path length is validated against the sample and predictor counts") {
  Philox rng(2, 3);
  StandardizedData data = random_standardized(rng, 6, 9);
  CHECK_THROWS_AS(fit_pls(data, -1), ComponentOutOfRange);
  CHECK_THROWS_AS(fit_pls(data, 6), ComponentOutOfRange);  // min(n-1, p) = 5
  CHECK_NOTHROW(fit_pls(data, 5));
}
