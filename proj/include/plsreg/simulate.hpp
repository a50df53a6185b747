#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "plsreg/dataprep.hpp"
#include "plsreg/rng.hpp"
#include "plsreg/selection.hpp"
#include "plsreg/types.hpp"

namespace plsreg {

// Nonlinear ground truth expanded in Gaussian bump functions: the predictors
// handed to the fit are the d basis values phi_j(x) = exp(-||x - c_j||^2), so
// the response is exactly linear in the predictors while d controls how
// collinear they are.
struct SimulationConfig {
  Matrix base_design;                            // pool of input sites in [-1,1]^q
  std::vector<int> d_values = {10, 50, 90, 130, 170, 210};
  int n_train = 50;
  int n_test = 153;
  double snr = 9.0;                              // var(f) / sigma^2 on training rows
  int reps = 1;
  std::uint64_t seed = 0;
  int m_max = 30;
  int cv_folds = 10;
};

struct RbfDesign {
  Matrix X;             // n x d basis values, entries in (0, 1]
  Matrix centers;       // d x q, drawn uniformly from [-1,1]^q
  Vector coefficients;  // d, drawn uniformly from [1,3]
  Vector f;             // n noise-free responses X * coefficients
};

// One simulated scenario per (d, rep, selection method).
struct SimulationCell {
  int d = 0;
  int rep = 0;
  SelectionMethod method = SelectionMethod::Cv;
  int chosen_m = 0;
  double chosen_dof = 0.0;
  double sigma_ratio = 0.0;      // estimated / true noise level
  double norm_test_error = 0.0;  // test MSE relative to the constant-mean model
};

// Per-(d, method) medians over repetitions.
struct MedianRow {
  int d = 0;
  SelectionMethod method = SelectionMethod::Cv;
  double norm_test_error = 0.0;
  double chosen_m = 0.0;
  double chosen_dof = 0.0;
  double sigma_ratio = 0.0;
};

struct SimulationReport {
  SimulationConfig config;
  std::vector<SimulationCell> cells;    // ordered by (d, rep, method)
  std::vector<MedianRow> medians;       // ordered by (d, method)
};

// Uniform pool of input sites on [-1,1]^dims.
Matrix default_base_design(int rows, int dims, std::uint64_t seed);

// Draws d centers, then d coefficients, from `rng` (in that order).
RbfDesign generate_rbf_design(const Matrix& base_rows, int d, Philox& rng);

// Add Gaussian noise at the level implied by the signal-to-noise ratio:
// sigma^2 = var(f) / snr, the variance taken over the first var_rows entries
// (all of f when var_rows < 0).  Returns the noisy response and sigma.
std::pair<Vector, double> draw_response(const Vector& f, double snr, Philox& rng,
                                        Index var_rows = -1);

// Full factorial run over d_values x repetitions x the four selection
// methods.  Every cell draws from its own generator substream keyed by
// (rep, d), so reports are identical no matter how cells are scheduled.
SimulationReport run_simulation(const SimulationConfig& config);

}  // namespace plsreg
