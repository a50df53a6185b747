#include "plsreg/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "plsreg/dof_krylov.hpp"
#include "plsreg/dof_lanczos.hpp"
#include "plsreg/errors.hpp"
#include "plsreg/pls.hpp"
#include "plsreg/rng.hpp"

namespace plsreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int pick_minimum(const std::vector<CriterionRow>& rows) {
  int best = -1;
  for (const auto& row : rows) {
    if (!row.valid || !std::isfinite(row.criterion)) continue;
    if (best < 0 || row.criterion < rows[static_cast<std::size_t>(best)].criterion) best = row.m;
  }
  if (best < 0) throw NumericalError("no selectable model size");
  return best;
}

}  // namespace

std::string to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::Cv: return "cv";
    case SelectionMethod::BicLanczos: return "bic-lanczos";
    case SelectionMethod::BicKrylov: return "bic-krylov";
    case SelectionMethod::BicNaive: return "bic-naive";
  }
  return "unknown";
}

double sigma_hat_star(const Vector& residual, const Matrix& H) {
  const Index n = H.rows();
  if (H.cols() != n || residual.size() != n)
    throw DimensionMismatch("residual and influence matrix sizes differ");
  // trace((I-H)(I-H^T)) equals the squared Frobenius norm of I - H.
  double denom = 0.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const double e = (i == j ? 1.0 : 0.0) - H(i, j);
      denom += e * e;
    }
  if (denom <= 1e-8) throw DegenerateDenominator("influence matrix is (numerically) a projection onto everything");
  return std::sqrt(residual.squaredNorm() / denom);
}

double sigma_hat(double rss, Index n, double dof) {
  if (rss < 0.0) throw InputError("residual sum of squares must be nonnegative");
  const double slack = static_cast<double>(n) - dof;
  if (slack <= 1e-8) throw DofExceedsN(dof, n);
  return std::sqrt(rss / slack);
}

double bic(double rss, Index n, double sigma2, double dof) {
  if (n < 1) throw DimensionTooSmall("criterion needs at least one observation");
  if (sigma2 < 0.0) throw InputError("noise variance must be nonnegative");
  return rss + std::log(static_cast<double>(n)) * sigma2 * dof;
}

std::pair<int, std::vector<bool>> truncate_negative_dof(const std::vector<double>& dof_path) {
  int prefix = static_cast<int>(dof_path.size());
  for (std::size_t i = 0; i < dof_path.size(); ++i) {
    if (dof_path[i] < 0.0) {
      prefix = static_cast<int>(i);
      break;
    }
  }
  std::vector<bool> flags(dof_path.size());
  for (std::size_t i = 0; i < dof_path.size(); ++i) flags[i] = static_cast<int>(i) < prefix;
  return {prefix, flags};
}

CriterionTable select_bic(const StandardizedData& data, int m_max, SelectionMethod method) {
  if (method == SelectionMethod::Cv)
    throw InputError("cross-validation is driven by cross_validate, not select_bic");
  if (m_max < 0) throw ComponentOutOfRange(m_max);
  const Index n = data.n();
  const int cap = static_cast<int>(std::min<Index>({static_cast<Index>(m_max), n - 1, data.p()}));

  PlsModel model = fit_pls(data, cap);

  CriterionTable table;
  table.method = method;

  // Complexity profile per engine; the Jacobian engine also supplies the
  // influence matrices its noise estimate needs.
  DofProfile profile;
  JacobianPath jacobians;
  switch (method) {
    case SelectionMethod::BicLanczos: {
      LanczosOptions options;
      options.retain_hats = true;
      jacobians = dof_lanczos(data, cap, options);
      profile.method = DofMethod::Lanczos;
      profile.dof = jacobians.dof;
      profile.truncated_at = jacobians.truncated_at;
      profile.reason = jacobians.reason;
      break;
    }
    case SelectionMethod::BicKrylov:
      profile = dof_profile_krylov(data, model, cap);
      break;
    default:
      profile = dof_profile_naive(model.components());
      if (model.truncated_at) {
        profile.truncated_at = *model.truncated_at;
        profile.reason = TruncationReason::DegenerateComponent;
      }
      break;
  }

  const auto [prefix, flags] = truncate_negative_dof(profile.dof);
  int usable = std::min<int>(prefix, static_cast<int>(profile.valid_count()));
  usable = std::min(usable, model.components() + 1);

  for (int m = 0; m < usable; ++m) {
    CriterionRow row;
    row.m = m;
    const Vector residual = data.y - data.X * model.beta_path.col(m);
    row.rss = residual.squaredNorm();
    row.dof = profile.dof[static_cast<std::size_t>(m)];
    try {
      if (method == SelectionMethod::BicLanczos) {
        const double s = sigma_hat_star(residual, approximate_hat_matrix(jacobians, m));
        row.sigma2_hat = s * s;
      } else {
        const double s = sigma_hat(row.rss, n, row.dof);
        row.sigma2_hat = s * s;
      }
      row.criterion = bic(row.rss, n, row.sigma2_hat, row.dof);
    } catch (const NumericalError&) {
      row.sigma2_hat = kNaN;
      row.criterion = kNaN;
      row.valid = false;
    }
    table.rows.push_back(row);
  }

  if (usable <= cap || profile.truncated_at) {
    table.truncated_at = usable;
    table.reason = prefix < static_cast<int>(profile.dof.size()) ? TruncationReason::NegativeDof
                                                                 : profile.reason;
  }
  table.chosen_m = pick_minimum(table.rows);
  return table;
}

CriterionTable cross_validate(const RawDataset& data, int m_max, const CvConfig& config) {
  const Index n = data.n();
  const Index p = data.p();
  if (m_max < 0) throw ComponentOutOfRange(m_max);
  if (config.folds < 2) throw FoldTooSmall("need at least two folds");
  if (static_cast<Index>(config.folds) > n) throw FoldTooSmall("more folds than observations");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  if (config.shuffle) {
    Philox rng(config.seed, /*stream=*/0x0cf01d5);
    shuffle(order, rng);
  }

  const int requested = static_cast<int>(std::min<Index>({static_cast<Index>(m_max), n - 1, p}));
  int usable = requested;

  // Pooled squared prediction error per candidate size, accumulated per fold
  // in fold order (deterministic given the seed).
  std::vector<double> sse(static_cast<std::size_t>(requested) + 1, 0.0);
  for (int f = 0; f < config.folds; ++f) {
    const Index lo = (n * f) / config.folds;
    const Index hi = (n * (f + 1)) / config.folds;
    const Index test_size = hi - lo;
    const Index train_size = n - test_size;
    if (train_size < 2) throw FoldTooSmall("training part of a fold has fewer than two rows");

    RawDataset train, test;
    train.X.resize(train_size, p);
    train.y.resize(train_size);
    test.X.resize(test_size, p);
    test.y.resize(test_size);
    Index ti = 0;
    for (Index k = 0; k < n; ++k) {
      const Index row = order[static_cast<std::size_t>(k)];
      if (k >= lo && k < hi) {
        test.X.row(k - lo) = data.X.row(row);
        test.y(k - lo) = data.y(row);
      } else {
        train.X.row(ti) = data.X.row(row);
        train.y(ti) = data.y(row);
        ++ti;
      }
    }

    StandardizedData train_std = standardize(train);
    const int fold_cap = static_cast<int>(
        std::min<Index>({static_cast<Index>(requested), train_size - 1, p}));
    PlsModel fold_model = fit_pls(train_std, fold_cap);
    usable = std::min(usable, fold_model.components());

    for (int m = 0; m <= fold_model.components(); ++m) {
      if (m >= static_cast<int>(sse.size())) break;
      AffineCoefficients coef = coefficients_original_scale(fold_model, m, train_std);
      const Vector pred = predict(coef.intercept, coef.beta, test.X);
      sse[static_cast<std::size_t>(m)] += (pred - test.y).squaredNorm();
    }
  }

  // Informational columns from the full-data fit: the spectral engine's
  // complexity where it is valid, the trivial count m+1 otherwise.
  StandardizedData full = standardize(data);
  PlsModel model = fit_pls(full, requested);
  usable = std::min(usable, model.components());
  DofProfile dof_info = dof_profile_krylov(full, model, usable);

  CriterionTable table;
  table.method = SelectionMethod::Cv;
  for (int m = 0; m <= usable; ++m) {
    CriterionRow row;
    row.m = m;
    const Vector residual = full.y - full.X * model.beta_path.col(m);
    row.rss = residual.squaredNorm();
    row.dof = static_cast<std::size_t>(m) < dof_info.valid_count()
                  ? dof_info.dof[static_cast<std::size_t>(m)]
                  : m + 1.0;
    try {
      const double s = sigma_hat(row.rss, n, row.dof);
      row.sigma2_hat = s * s;
    } catch (const NumericalError&) {
      row.sigma2_hat = kNaN;
    }
    row.criterion = sse[static_cast<std::size_t>(m)] / static_cast<double>(n);
    table.rows.push_back(row);
  }
  if (usable < requested) {
    table.truncated_at = usable + 1;
    table.reason = TruncationReason::DegenerateComponent;
  }
  table.chosen_m = pick_minimum(table.rows);
  return table;
}

}  // namespace plsreg
