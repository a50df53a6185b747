#include "plsreg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "plsreg/dof_krylov.hpp"
#include "plsreg/errors.hpp"
#include "plsreg/pls.hpp"

namespace plsreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median_finite(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return !std::isfinite(v); }),
               values.end());
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

Matrix default_base_design(int rows, int dims, std::uint64_t seed) {
  if (rows < 1 || dims < 1) throw InputError("base design needs positive dimensions");
  Philox rng(seed, /*stream=*/0xba5ed);
  Matrix base(rows, dims);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < dims; ++j) base(i, j) = rng.uniform(-1.0, 1.0);
  return base;
}

RbfDesign generate_rbf_design(const Matrix& base_rows, int d, Philox& rng) {
  if (d < 1) throw InputError("need at least one basis function");
  const Index n = base_rows.rows();
  const Index q = base_rows.cols();

  RbfDesign design;
  design.centers.resize(d, q);
  for (int j = 0; j < d; ++j)
    for (Index k = 0; k < q; ++k) design.centers(j, k) = rng.uniform(-1.0, 1.0);
  design.coefficients.resize(d);
  for (int j = 0; j < d; ++j) design.coefficients(j) = rng.uniform(1.0, 3.0);

  design.X.resize(n, d);
  for (Index i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      design.X(i, j) =
          std::exp(-(base_rows.row(i) - design.centers.row(j)).squaredNorm());
  design.f = design.X * design.coefficients;
  return design;
}

std::pair<Vector, double> draw_response(const Vector& f, double snr, Philox& rng,
                                        Index var_rows) {
  if (!(snr > 0.0)) throw InputError("signal-to-noise ratio must be positive");
  if (var_rows < 0) var_rows = f.size();
  if (var_rows < 2 || var_rows > f.size())
    throw DimensionTooSmall("need at least two rows to measure the signal variance");

  const auto head = f.head(var_rows);
  const double mean = head.mean();
  const double variance =
      (head.array() - mean).square().sum() / static_cast<double>(var_rows - 1);
  if (!(variance > 0.0)) throw DegenerateSignal();

  const double sigma = std::sqrt(variance / snr);
  Vector y(f.size());
  for (Index i = 0; i < f.size(); ++i) y(i) = f(i) + sigma * rng.normal();
  return {y, sigma};
}

namespace {

struct CellResult {
  int chosen_m = 0;
  double chosen_dof = kNaN;
  double sigma_ratio = kNaN;
  double norm_test_error = kNaN;
};

CellResult evaluate_choice(const CriterionTable& table, const PlsModel& model,
                           const StandardizedData& train_std, const Matrix& X_test,
                           const Vector& y_test, double trivial_mse, double sigma_true) {
  CellResult out;
  out.chosen_m = table.chosen_m;
  const CriterionRow& row = table.chosen();
  out.chosen_dof = row.dof;
  out.sigma_ratio = std::sqrt(row.sigma2_hat) / sigma_true;
  AffineCoefficients coef = coefficients_original_scale(model, table.chosen_m, train_std);
  const Vector pred = predict(coef.intercept, coef.beta, X_test);
  out.norm_test_error =
      (pred - y_test).squaredNorm() / static_cast<double>(y_test.size()) / trivial_mse;
  return out;
}

}  // namespace

SimulationReport run_simulation(const SimulationConfig& config) {
  const Index pool = config.base_design.rows();
  const Index n_total = static_cast<Index>(config.n_train) + config.n_test;
  if (config.n_train < 4) throw InputError("need at least four training rows");
  if (config.n_test < 1) throw InputError("need at least one test row");
  if (n_total > pool) throw SplitTooLarge("train+test exceeds the base design pool");
  if (config.reps < 1) throw InputError("need at least one repetition");
  if (config.m_max < 0) throw ComponentOutOfRange(config.m_max);
  if (config.d_values.empty()) throw InputError("no basis sizes requested");
  for (int d : config.d_values)
    if (d < 1) throw InputError("basis sizes must be positive");

  SimulationReport report;
  report.config = config;

  const SelectionMethod methods[] = {SelectionMethod::Cv, SelectionMethod::BicLanczos,
                                     SelectionMethod::BicKrylov, SelectionMethod::BicNaive};

  for (int d : config.d_values) {
    for (int rep = 0; rep < config.reps; ++rep) {
      // Substream address (rep, d); draw order within a cell: split
      // permutation, centers, coefficients, noise, cross-validation seed.
      const std::uint64_t stream = (static_cast<std::uint64_t>(rep) << 32) |
                                   static_cast<std::uint64_t>(static_cast<std::uint32_t>(d));
      Philox rng(config.seed, stream);

      std::vector<Index> perm(static_cast<std::size_t>(pool));
      std::iota(perm.begin(), perm.end(), Index{0});
      shuffle(perm, rng);
      Matrix sites(n_total, config.base_design.cols());
      for (Index i = 0; i < n_total; ++i)
        sites.row(i) = config.base_design.row(perm[static_cast<std::size_t>(i)]);

      RbfDesign rbf = generate_rbf_design(sites, d, rng);
      auto [y, sigma_true] = draw_response(rbf.f, config.snr, rng, config.n_train);
      const std::uint64_t cv_seed = rng.next_u64();

      RawDataset train;
      train.X = rbf.X.topRows(config.n_train);
      train.y = y.head(config.n_train);
      const Matrix X_test = rbf.X.bottomRows(config.n_test);
      const Vector y_test = y.tail(config.n_test);

      const double trivial_mse =
          (y_test.array() - train.y.mean()).square().sum() / static_cast<double>(config.n_test);
      if (!(trivial_mse > 0.0)) throw DegenerateSignal();

      StandardizedData train_std = standardize(train);
      const int m_eff = static_cast<int>(
          std::min<Index>({static_cast<Index>(config.m_max), train.n() - 1, train.p()}));
      PlsModel model = fit_pls(train_std, m_eff);

      CvConfig cv_config;
      cv_config.folds = config.cv_folds;
      cv_config.seed = cv_seed;
      CriterionTable tables[] = {
          cross_validate(train, m_eff, cv_config),
          select_bic(train_std, m_eff, SelectionMethod::BicLanczos),
          select_bic(train_std, m_eff, SelectionMethod::BicKrylov),
          select_bic(train_std, m_eff, SelectionMethod::BicNaive),
      };

      for (int t = 0; t < 4; ++t) {
        CellResult res = evaluate_choice(tables[t], model, train_std, X_test, y_test,
                                         trivial_mse, sigma_true);
        SimulationCell cell;
        cell.d = d;
        cell.rep = rep;
        cell.method = methods[t];
        cell.chosen_m = res.chosen_m;
        cell.chosen_dof = res.chosen_dof;
        cell.sigma_ratio = res.sigma_ratio;
        cell.norm_test_error = res.norm_test_error;
        report.cells.push_back(cell);
      }
    }
  }

  for (int d : config.d_values) {
    for (SelectionMethod method : methods) {
      std::vector<double> err, m_vals, dof_vals, ratio;
      for (const auto& cell : report.cells) {
        if (cell.d != d || cell.method != method) continue;
        err.push_back(cell.norm_test_error);
        m_vals.push_back(cell.chosen_m);
        dof_vals.push_back(cell.chosen_dof);
        ratio.push_back(cell.sigma_ratio);
      }
      MedianRow row;
      row.d = d;
      row.method = method;
      row.norm_test_error = median_finite(err);
      row.chosen_m = median_finite(m_vals);
      row.chosen_dof = median_finite(dof_vals);
      row.sigma_ratio = median_finite(ratio);
      report.medians.push_back(row);
    }
  }
  return report;
}

}  // namespace plsreg
