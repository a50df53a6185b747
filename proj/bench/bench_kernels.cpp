// Times the blocked (OpenMP) derivative-propagation kernel against the serial
// reference kernel on a grid of problem sizes and reports the largest
// disagreement in the resulting degrees-of-freedom paths.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "plsreg/dataprep.hpp"
#include "plsreg/dof_lanczos.hpp"
#include "plsreg/rng.hpp"
#include "plsreg/threading.hpp"

namespace {

using plsreg::Index;
using plsreg::Matrix;
using plsreg::Vector;

plsreg::StandardizedData make_instance(std::uint64_t seed, Index n, Index p) {
  plsreg::Philox rng(seed, /*stream=*/0xbe4c4);
  plsreg::RawDataset raw;
  raw.X.resize(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) raw.X(i, j) = rng.normal();
  Vector beta(p);
  for (Index j = 0; j < p; ++j) beta(j) = rng.uniform(-1.0, 1.0);
  raw.y = raw.X * beta;
  for (Index i = 0; i < n; ++i) raw.y(i) += 0.5 * rng.normal();
  return plsreg::standardize(raw);
}

double time_once(const plsreg::StandardizedData& data, int m, plsreg::Kernel kernel) {
  plsreg::LanczosOptions options;
  options.kernel = kernel;
  const auto start = std::chrono::steady_clock::now();
  const plsreg::JacobianPath path = plsreg::dof_lanczos(data, m, options);
  const auto stop = std::chrono::steady_clock::now();
  // Touch the result so the call cannot be elided.
  if (path.dof.empty()) std::abort();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

double best_of(int repeats, const plsreg::StandardizedData& data, int m,
               plsreg::Kernel kernel) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) best = std::min(best, time_once(data, m, kernel));
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  plsreg::threading::configure_from_env();
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  if (repeats < 1) {
    std::fprintf(stderr, "usage: bench_kernels [repeats>=1]\n");
    return 2;
  }

  struct Case {
    Index n, p;
    int m;
  };
  const Case grid[] = {{120, 30, 8}, {250, 60, 12}, {500, 100, 16}, {800, 150, 20}};

  std::printf("threads=%d repeats=%d\n", plsreg::threading::max_threads(), repeats);
  std::printf("%6s %6s %4s %14s %14s %8s %12s\n", "n", "p", "m", "blocked_ms",
              "reference_ms", "speedup", "max|d dof|");
  for (const Case& c : grid) {
    const plsreg::StandardizedData data = make_instance(20260815, c.n, c.p);
    const double t_blocked = best_of(repeats, data, c.m, plsreg::Kernel::Blocked);
    const double t_reference = best_of(repeats, data, c.m, plsreg::Kernel::Reference);

    plsreg::LanczosOptions blocked, reference;
    blocked.kernel = plsreg::Kernel::Blocked;
    reference.kernel = plsreg::Kernel::Reference;
    const std::vector<double> dof_b = plsreg::dof_lanczos(data, c.m, blocked).dof;
    const std::vector<double> dof_r = plsreg::dof_lanczos(data, c.m, reference).dof;
    double max_diff = 0.0;
    for (std::size_t i = 0; i < dof_b.size(); ++i)
      max_diff = std::max(max_diff, std::abs(dof_b[i] - dof_r[i]));

    std::printf("%6td %6td %4d %14.2f %14.2f %8.2f %12.3e\n", c.n, c.p, c.m, t_blocked,
                t_reference, t_reference / t_blocked, max_diff);
  }
  return 0;
}
