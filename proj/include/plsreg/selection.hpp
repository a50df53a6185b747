#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "plsreg/dataprep.hpp"
#include "plsreg/dof_profile.hpp"
#include "plsreg/types.hpp"

namespace plsreg {

enum class SelectionMethod { Cv, BicLanczos, BicKrylov, BicNaive };

std::string to_string(SelectionMethod method);

struct CriterionRow {
  int m = 0;
  double rss = 0.0;         // training residual sum of squares
  double dof = 0.0;         // complexity estimate entering the criterion
  double sigma2_hat = 0.0;  // per-model noise estimate (NaN when undefined)
  double criterion = 0.0;   // information criterion or cross-validation MSE
  bool valid = true;        // eligible when choosing the model size
};

struct CriterionTable {
  SelectionMethod method = SelectionMethod::BicNaive;
  std::vector<CriterionRow> rows;  // m = 0 .. largest usable size
  int chosen_m = 0;
  std::optional<int> truncated_at;  // first m excluded from the table
  TruncationReason reason = TruncationReason::None;

  const CriterionRow& chosen() const { return rows[static_cast<std::size_t>(chosen_m)]; }
};

struct CvConfig {
  int folds = 10;
  std::uint64_t seed = 0;
  bool shuffle = true;  // off: folds are contiguous index blocks
};

// Unbiased noise scale from a non-projection smoother: residual sum of
// squares divided by trace((I-H)(I-H^T)).  Returns sigma, not sigma^2.
double sigma_hat_star(const Vector& residual, const Matrix& H);

// Classical residual noise scale: sqrt(rss / (n - dof)).
double sigma_hat(double rss, Index n, double dof);

// Schwarz-type criterion: rss + log(n) * sigma2 * dof.
double bic(double rss, Index n, double sigma2, double dof);

// First negative entry invalidates everything from there on (estimates past a
// sign flip are untrustworthy even if they recover).  Returns the length of
// the valid prefix and a per-entry flag vector.
std::pair<int, std::vector<bool>> truncate_negative_dof(const std::vector<double>& dof_path);

// Sweep m = 0 .. min(m_max, n-1, p) and pick the minimizer of the criterion.
// The complexity engine is chosen by `method` (BicLanczos pairs the Jacobian
// estimate with sigma_hat_star; BicKrylov and BicNaive use sigma_hat).
CriterionTable select_bic(const StandardizedData& data, int m_max, SelectionMethod method);

// K-fold cross-validation on raw data; standardization statistics are
// recomputed inside every training fold so no test information leaks in.
// The dof/sigma columns are informational (taken from the full-data fit).
CriterionTable cross_validate(const RawDataset& data, int m_max, const CvConfig& config = {});

}  // namespace plsreg
