#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "plsreg/dataprep.hpp"
#include "plsreg/errors.hpp"
#include "support/instances.hpp"

using namespace plsreg;
using testsupport::random_dataset;

namespace {

std::filesystem::path temp_csv(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream file(path);
  file << content;
  return path;
}

}  // namespace

TEST_CASE("standardization of a three-point line is exact") {
  RawDataset raw;
  raw.X.resize(3, 1);
  raw.X << 1, 2, 3;
  raw.y.resize(3);
  raw.y << 2, 4, 6;

  StandardizedData data = standardize(raw);
  CHECK(data.x_bar(0) == doctest::Approx(2.0));
  CHECK(data.s_x(0) == doctest::Approx(1.0));
  CHECK(data.y_bar == doctest::Approx(4.0));
  CHECK(data.X(0, 0) == doctest::Approx(-1.0));
  CHECK(data.X(1, 0) == doctest::Approx(0.0));
  CHECK(data.X(2, 0) == doctest::Approx(1.0));
  CHECK(data.y(0) == doctest::Approx(-2.0));
  CHECK(data.y(2) == doctest::Approx(2.0));
}

TEST_CASE("standardized columns have mean zero and unit variance") {
  Philox rng(2024, 1);
  for (int trial = 0; trial < 5; ++trial) {
    RawDataset raw = random_dataset(rng, 17, 6);
    raw.X.col(2) *= 40.0;  // wildly different scales must not matter
    raw.X.col(3).array() += 900.0;
    StandardizedData data = standardize(raw);
    for (Index j = 0; j < data.p(); ++j) {
      CHECK(std::abs(data.X.col(j).mean()) < 1e-8);
      const double var = data.X.col(j).squaredNorm() / static_cast<double>(data.n() - 1);
      CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(std::abs(data.y.mean()) < 1e-8);
  }
}

TEST_CASE("standardization is idempotent") {
  Philox rng(5, 0);
  RawDataset raw = random_dataset(rng, 12, 4);
  StandardizedData once = standardize(raw);
  RawDataset again;
  again.X = once.X;
  again.y = once.y;
  StandardizedData twice = standardize(again);
  CHECK((twice.X - once.X).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((twice.y - once.y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("degenerate inputs are rejected") {
  RawDataset raw;
  raw.X = Matrix::Ones(5, 2);
  raw.X.col(1) << 1, 2, 3, 4, 5;
  raw.y = Vector::Zero(5);
  CHECK_THROWS_AS(standardize(raw), ZeroVarianceColumn);

  raw.X(0, 0) = 2.0;  // fix the constant column
  raw.y(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(standardize(raw), NonFiniteInput);

  RawDataset tiny;
  tiny.X = Matrix::Ones(1, 1);
  tiny.y = Vector::Zero(1);
  CHECK_THROWS_AS(standardize(tiny), InvalidDataset);
}

TEST_CASE("moments of an orthogonal design are the identity") {
  RawDataset raw;
  raw.X.resize(3, 2);
  raw.X << -1, 1, 0, -2, 1, 1;  // centered, mutually orthogonal columns
  raw.y.resize(3);
  raw.y << 1, 0, -1;
  MomentSummary mom = moments(standardize(raw));
  CHECK((mom.S - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("duplicated predictors show correlation one") {
  Philox rng(8, 2);
  RawDataset raw = random_dataset(rng, 9, 1);
  RawDataset dup;
  dup.X.resize(9, 2);
  dup.X.col(0) = raw.X.col(0);
  dup.X.col(1) = 2.0 * raw.X.col(0);  // same direction, different scale
  dup.y = raw.y;
  MomentSummary mom = moments(standardize(dup));
  CHECK(mom.S(0, 1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mean_abs_correlation(mom.S) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("moment matrices match the entrywise correlation oracle") {
  Philox rng(31, 4);
  RawDataset raw = random_dataset(rng, 6, 3);
  StandardizedData data = standardize(raw);
  MomentSummary mom = moments(data);

  const Index n = raw.n();
  for (Index a = 0; a < 3; ++a) {
    for (Index b = 0; b < 3; ++b) {
      // Pearson correlation computed straight from the raw columns.
      const double ma = raw.X.col(a).mean(), mb = raw.X.col(b).mean();
      double num = 0.0, va = 0.0, vb = 0.0;
      for (Index i = 0; i < n; ++i) {
        num += (raw.X(i, a) - ma) * (raw.X(i, b) - mb);
        va += (raw.X(i, a) - ma) * (raw.X(i, a) - ma);
        vb += (raw.X(i, b) - mb) * (raw.X(i, b) - mb);
      }
      CHECK(mom.S(a, b) == doctest::Approx(num / std::sqrt(va * vb)).epsilon(1e-10));
    }
    const double my = raw.y.mean();
    double cov = 0.0;
    for (Index i = 0; i < n; ++i) cov += (raw.X(i, a) - raw.X.col(a).mean()) * (raw.y(i) - my);
    CHECK(mom.s(a) ==
          doctest::Approx(cov / (static_cast<double>(n - 1) * data.s_x(a))).epsilon(1e-10));
  }
}

TEST_CASE("row kernel and correlation matrix share nonzero eigenvalues") {
  Philox rng(77, 0);
  for (auto [n, p] : {std::pair<Index, Index>{7, 4}, {5, 9}}) {
    StandardizedData data = testsupport::random_standardized(rng, n, p);
    MomentSummary mom = moments(data);
    Eigen::SelfAdjointEigenSolver<Matrix> ek(mom.K), es(static_cast<double>(n - 1) * mom.S);
    std::vector<double> lk, ls;
    for (Index i = 0; i < n; ++i)
      if (ek.eigenvalues()(i) > 1e-8) lk.push_back(ek.eigenvalues()(i));
    for (Index i = 0; i < p; ++i)
      if (es.eigenvalues()(i) > 1e-8) ls.push_back(es.eigenvalues()(i));
    REQUIRE(lk.size() == ls.size());
    for (std::size_t i = 0; i < lk.size(); ++i)
      CHECK(lk[i] == doctest::Approx(ls[i]).epsilon(1e-8));
    // K is positive semidefinite up to rounding.
    CHECK(ek.eigenvalues().minCoeff() > -1e-8 * std::max(1.0, ek.eigenvalues().maxCoeff()));
  }
}

TEST_CASE("mean absolute correlation is invariant under permutation and sign flips") {
  Philox rng(15, 6);
  StandardizedData data = testsupport::random_standardized(rng, 14, 5);
  MomentSummary mom = moments(data);
  const double base = mean_abs_correlation(mom.S);

  StandardizedData shuffled = data;
  shuffled.X.col(0).swap(shuffled.X.col(3));
  shuffled.X.col(1) = -shuffled.X.col(1);
  MomentSummary mom2 = moments(shuffled);
  CHECK(mean_abs_correlation(mom2.S) == doctest::Approx(base).epsilon(1e-12));

  CHECK_THROWS_AS(mean_abs_correlation(Matrix::Identity(1, 1)), DimensionTooSmall);
}

TEST_CASE("csv loading picks the target column and keeps predictor order") {
  auto path = temp_csv("plsreg_load.csv", "a,target,b\n1,10,4\n2,20,5\n3,30,6\n");
  RawDataset data = load_csv(path.string(), "target");
  CHECK(data.n() == 3);
  CHECK(data.p() == 2);
  CHECK(data.names == std::vector<std::string>{"a", "b"});
  CHECK(data.y(1) == doctest::Approx(20.0));
  CHECK(data.X(2, 0) == doctest::Approx(3.0));
  CHECK(data.X(2, 1) == doctest::Approx(6.0));
  std::filesystem::remove(path);
}

TEST_CASE("csv loading rejects malformed input") {
  auto missing = temp_csv("plsreg_missing.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(load_csv(missing.string(), "target"), MissingTarget);
  std::filesystem::remove(missing);

  auto ragged = temp_csv("plsreg_ragged.csv", "a,b,y\n1,2,3\n1,2\n");
  CHECK_THROWS_AS(load_csv(ragged.string(), "y"), ParseError);
  std::filesystem::remove(ragged);

  auto blank = temp_csv("plsreg_blank.csv", "a,b,y\n1,,3\n");
  CHECK_THROWS_AS(load_csv(blank.string(), "y"), NonNumericCell);
  std::filesystem::remove(blank);

  CHECK_THROWS_AS(load_csv("/nonexistent/nowhere.csv", "y"), InputError);
}

TEST_CASE("csv round trip preserves every value bit for bit") {
  Philox rng(4, 4);
  RawDataset data = random_dataset(rng, 11, 3);
  data.names = {"alpha", "beta", "gamma"};
  auto path = std::filesystem::temp_directory_path() / "plsreg_roundtrip.csv";
  save_csv(data, path.string(), "response");
  RawDataset loaded = load_csv(path.string(), "response");
  REQUIRE(loaded.n() == data.n());
  REQUIRE(loaded.p() == data.p());
  CHECK(loaded.names == data.names);
  CHECK((loaded.X - data.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.y - data.y).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("coefficients map back to original units") {
  Philox rng(90, 1);
  RawDataset raw = random_dataset(rng, 10, 3);
  StandardizedData data = standardize(raw);
  Vector beta_std = testsupport::random_vector(rng, 3);
  AffineCoefficients coef = to_original_scale(data, beta_std);
  // Predictions computed in either scale agree.
  Vector via_std = (data.X * beta_std).array() + data.y_bar;
  Vector via_raw = (raw.X * coef.beta).array() + coef.intercept;
  CHECK((via_std - via_raw).cwiseAbs().maxCoeff() < 1e-10);
}
