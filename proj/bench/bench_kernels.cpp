// Times the OpenMP matrix-assembly and psi-lattice kernels against their
// single-thread runs and checks they produce the same numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "confhe/quadrature.hpp"
#include "confhe/schmidt.hpp"
#include "confhe/solver.hpp"

using namespace confhe;

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double best_of(int reps, const F& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const double t0 = now();
    f();
    best = std::min(best, now() - t0);
  }
  return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("threads: %d\n\n", threads);

  const int omega = 5;
  const auto spec = HamiltonianSpec::confined(2.5);
  const double alpha = 1.3;
  const auto rule = build_rule_3d(
      spec.R, {default_radial_order(omega), default_radial_order(omega),
               default_radial_order(omega)},
      PairSymmetry::exchange);

  std::printf("matrix assembly  omega=%d  basis=%zu  nodes=%zu\n", omega,
              basis_size(omega), rule.size());
  MatrixPair serial, parallel;
  const double t_serial = best_of(3, [&] {
    serial = assemble_matrices(omega, alpha, spec, rule, false);
  });
  const double t_parallel = best_of(3, [&] {
    parallel = assemble_matrices(omega, alpha, spec, rule, true);
  });
  const double diff =
      (serial.hamiltonian - parallel.hamiltonian).cwiseAbs().maxCoeff() +
      (serial.overlap - parallel.overlap).cwiseAbs().maxCoeff();
  std::printf("  serial   %8.3f s\n", t_serial);
  std::printf("  openmp   %8.3f s   speedup %.2fx   max |diff| %.2e\n\n",
              t_parallel, t_serial / t_parallel, diff);

  const auto state = solve_fixed_alpha(omega, alpha, spec);
  const int n_m = 301;
  std::vector<double> grid(n_m);
  for (int i = 0; i < n_m; ++i) grid[i] = spec.R * i / (n_m - 1);
  const AngleRule angle = AngleRule::gauss(64);

  std::printf("psi lattice  n_m=%d  angle=%d\n", n_m, angle.size());
  double checksum_serial = 0.0, checksum_parallel = 0.0;
  const double tl_serial = best_of(3, [&] {
    PsiLattice lat(state, grid, angle, false);
    checksum_serial = lat(n_m / 2, n_m / 2, 0);
  });
  const double tl_parallel = best_of(3, [&] {
    PsiLattice lat(state, grid, angle, true);
    checksum_parallel = lat(n_m / 2, n_m / 2, 0);
  });
  std::printf("  serial   %8.3f s\n", tl_serial);
  std::printf("  openmp   %8.3f s   speedup %.2fx   |diff| %.2e\n", tl_parallel,
              tl_serial / tl_parallel,
              std::abs(checksum_serial - checksum_parallel));
  return 0;
}
