#include <atomic>
#include <cmath>

#include "doctest.h"
#include "plsreg/dof_lanczos.hpp"
#include "plsreg/dof_oracle.hpp"
#include "plsreg/errors.hpp"
#include "support/instances.hpp"

using namespace plsreg;
using testsupport::pls_fit_fn;
using testsupport::random_dataset;
using testsupport::random_standardized;
using testsupport::spectrum_design;

TEST_CASE("trace of the identity map is the sample size") {
  Vector y(5);
  y << 1, -2, 3, 0.5, 4;
  CHECK(fd_trace([](const Vector& v) { return v; }, y) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("trace of a scalar shrinkage map") {
  Vector y(3);
  y << 2, 3, 5;
  auto half = [](const Vector& v) { return Vector(0.5 * v); };
  CHECK(fd_trace(half, y) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("trace of a general linear map matches the matrix trace") {
  Philox rng(10, 1);
  const Index n = 7;
  Matrix H = testsupport::random_matrix(rng, n, n);
  Vector y = testsupport::random_vector(rng, n);
  auto fn = [&H](const Vector& v) { return Vector(H * v); };
  SUBCASE("central differences") {
    CHECK(std::abs(fd_trace(fn, y) - H.trace()) < 1e-8 * n);
  }
  SUBCASE("forward differences") {
    FdConfig config;
    config.scheme = FdConfig::Scheme::Forward;
    CHECK(std::abs(fd_trace(fn, y, config) - H.trace()) < 1e-6 * n);
  }
}

TEST_CASE("the mean model has one degree of freedom") {
  Philox rng(22, 0);
  RawDataset raw = random_dataset(rng, 9, 3);
  CHECK(std::abs(fd_trace(pls_fit_fn(raw.X, 0), raw.y) - 1.0) < 1e-6);
}

TEST_CASE("a stateful fit function is rejected") {
  Vector y(4);
  y << 1, 2, 3, 4;
  std::atomic<int> calls{0};
  auto fn = [&calls](const Vector& v) { return Vector(v * (1.0 + 0.1 * calls++)); };
  CHECK_THROWS_AS(fd_trace(fn, y), NonDeterministicFit);
}

TEST_CASE("closed form for one component: identity moments give p + 1") {
  const Index p = 6;
  Philox rng(31, 3);
  Vector s = testsupport::random_vector(rng, p);
  CHECK(closed_form_dof_one_component(Matrix::Identity(p, p), s) ==
        doctest::Approx(static_cast<double>(p) + 1.0).epsilon(1e-12));
}

TEST_CASE("closed form for one component: a single predictor gives 2") {
  Matrix S = Matrix::Identity(1, 1);
  Vector s(1);
  s << 0.37;
  CHECK(closed_form_dof_one_component(S, s) == doctest::Approx(2.0).epsilon(1e-12));
  s << 0.0;
  CHECK_THROWS_AS(closed_form_dof_one_component(S, s), ZeroGradient);
}

TEST_CASE("closed form agrees with the propagated derivative at one component") {
  Philox rng(105, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 8 + static_cast<Index>(rng.below(25));
    const Index p = 2 + static_cast<Index>(rng.below(9));
    StandardizedData data = random_standardized(rng, n, p, 0.4 * (trial % 3));
    MomentSummary mom = moments(data);
    const double expected = closed_form_dof_one_component(mom.S, mom.s);
    JacobianPath path = dof_lanczos(data, 1);
    REQUIRE(path.dof.size() >= 2);
    CHECK(std::abs(path.dof[1] - expected) < 1e-8 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("spectral lower bound: identity moments") {
  CHECK(dof_lower_bound(Matrix::Identity(3, 3)).value() == doctest::Approx(4.0));
}

TEST_CASE("spectral lower bound: dominant eigenvalue voids the hypothesis") {
  Matrix S = Matrix::Zero(2, 2);
  S(0, 0) = 3.0;
  S(1, 1) = 1.0;
  CHECK(!dof_lower_bound(S).has_value());
}

TEST_CASE("spectral lower bound: prescribed spectrum") {
  Matrix S = Matrix::Zero(3, 3);
  S(0, 0) = 1.0;
  S(1, 1) = 1.0;
  S(2, 2) = 0.5;
  CHECK(dof_lower_bound(S).value() == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("one-component complexity respects the spectral lower bound") {
  Philox rng(200, 7);
  // Trace-normalized version of the spectrum (1, 1, 0.5): the bound, which is
  // scale invariant, stays 1 + 2.5/1 = 3.5.
  StandardizedData data = spectrum_design(rng, 24, {1.0, 1.0, 0.5});
  MomentSummary mom = moments(data);
  auto bound = dof_lower_bound(mom.S);
  REQUIRE(bound.has_value());
  CHECK(*bound == doctest::Approx(3.5).epsilon(1e-8));
  JacobianPath path = dof_lanczos(data, 1);
  CHECK(path.dof[1] >= *bound - 1e-6);
}

TEST_CASE("finite differences confirm the propagated derivative on random instances") {
  Philox rng(300, 1);
  for (int trial = 0; trial < 3; ++trial) {
    RawDataset raw = random_dataset(rng, 10, 4);
    StandardizedData data = standardize(raw);
    JacobianPath path = dof_lanczos(data, 3);
    REQUIRE(path.dof.size() == 4);
    for (int m = 1; m <= 3; ++m) {
      const double fd = fd_trace(pls_fit_fn(raw.X, m), raw.y);
      CHECK(std::abs(fd - path.dof[static_cast<std::size_t>(m)]) <
            1e-3 * std::max(1.0, std::abs(fd)));
    }
  }
}
