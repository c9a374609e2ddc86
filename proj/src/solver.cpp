#include "confhe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace confhe {

HamiltonianSpec HamiltonianSpec::confined(double R) {
  if (!(R > 0.0))
    throw std::invalid_argument("HamiltonianSpec: cavity radius must be > 0");
  HamiltonianSpec s;
  s.R = R;
  return s;
}

HamiltonianSpec HamiltonianSpec::free_atom() {
  return confined(kFreeAtomRadius);
}

namespace {

int thread_count(bool parallel) {
#ifdef _OPENMP
  return parallel ? omp_get_max_threads() : 1;
#else
  (void)parallel;
  return 1;
#endif
}

}  // namespace

MatrixPair assemble_matrices(int omega, double alpha,
                             const HamiltonianSpec& spec,
                             const QuadratureRule3D& rule, bool parallel) {
  const BasisSet set(omega);
  const int M = static_cast<int>(set.size());
  const auto Q = static_cast<std::ptrdiff_t>(rule.size());
  const double Z = spec.Z;
  const double ee = spec.interaction_on ? 1.0 : 0.0;

  const int nthreads = thread_count(parallel);
  // one lower-triangle accumulator pair per thread, reduced in thread order
  std::vector<std::vector<double>> s_loc(
      nthreads, std::vector<double>(static_cast<std::size_t>(M) * M, 0.0));
  std::vector<std::vector<double>> h_loc = s_loc;

#pragma omp parallel num_threads(nthreads) if (parallel)
  {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    double* Sb = s_loc[static_cast<std::size_t>(tid)].data();
    double* Hb = h_loc[static_cast<std::size_t>(tid)].data();
    std::vector<double> val(M), d1(M), d2(M), du(M);
    std::vector<double> p1(M), q1(M), p2(M), q2(M);

#pragma omp for schedule(static)
    for (std::ptrdiff_t q = 0; q < Q; ++q) {
      const double r1 = rule.r1[q];
      const double r2 = rule.r2[q];
      const double u = rule.u[q];
      const double w = rule.w[q];
      set.eval_all(alpha, spec.R, {r1, r2, u}, val, d1, d2, du);

      // cosines between r_i-hat and the u gradient; clamp against rounding
      const double c1 =
          std::clamp((r1 * r1 - r2 * r2 + u * u) / (2.0 * r1 * u), -1.0, 1.0);
      const double c2 =
          std::clamp((r2 * r2 - r1 * r1 + u * u) / (2.0 * r2 * u), -1.0, 1.0);
      const double s1 = std::sqrt(1.0 - c1 * c1);
      const double s2 = std::sqrt(1.0 - c2 * c2);
      for (int i = 0; i < M; ++i) {
        p1[i] = d1[i] + c1 * du[i];
        q1[i] = s1 * du[i];
        p2[i] = d2[i] + c2 * du[i];
        q2[i] = s2 * du[i];
      }
      const double pot = -Z / r1 - Z / r2 + ee / u;

      const double* vv = val.data();
      const double* pp1 = p1.data();
      const double* qq1 = q1.data();
      const double* pp2 = p2.data();
      const double* qq2 = q2.data();
      for (int i = 0; i < M; ++i) {
        const double wv = w * vv[i];
        const double pv = pot * wv;
        const double hw = 0.5 * w;
        const double a1 = hw * pp1[i];
        const double b1 = hw * qq1[i];
        const double a2 = hw * pp2[i];
        const double b2 = hw * qq2[i];
        double* Srow = Sb + static_cast<std::size_t>(i) * M;
        double* Hrow = Hb + static_cast<std::size_t>(i) * M;
        for (int j = 0; j <= i; ++j) {
          Srow[j] += wv * vv[j];
          Hrow[j] += pv * vv[j] + a1 * pp1[j] + b1 * qq1[j] + a2 * pp2[j] +
                     b2 * qq2[j];
        }
      }
    }
  }

  MatrixPair out{Eigen::MatrixXd::Zero(M, M), Eigen::MatrixXd::Zero(M, M)};
  for (int t = 0; t < nthreads; ++t) {
    const double* Sb = s_loc[static_cast<std::size_t>(t)].data();
    const double* Hb = h_loc[static_cast<std::size_t>(t)].data();
    for (int i = 0; i < M; ++i)
      for (int j = 0; j <= i; ++j) {
        out.overlap(i, j) += Sb[static_cast<std::size_t>(i) * M + j];
        out.hamiltonian(i, j) += Hb[static_cast<std::size_t>(i) * M + j];
      }
  }
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < i; ++j) {
      out.overlap(j, i) = out.overlap(i, j);
      out.hamiltonian(j, i) = out.hamiltonian(i, j);
    }
  return out;
}

MatrixPair assemble_matrices_reference(int omega, double alpha,
                                       const HamiltonianSpec& spec,
                                       const QuadratureRule3D& rule) {
  const auto indices = enumerate_basis(omega);
  const int M = static_cast<int>(indices.size());
  MatrixPair out{Eigen::MatrixXd::Zero(M, M), Eigen::MatrixXd::Zero(M, M)};
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s_ij = 0.0, h_ij = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const HylleraasPoint pt = rule.node(q);
        const BasisEval fi = eval_basis(indices[static_cast<std::size_t>(i)],
                                        alpha, spec.R, pt);
        const BasisEval fj = eval_basis(indices[static_cast<std::size_t>(j)],
                                        alpha, spec.R, pt);
        const double w = rule.w[q];
        const double c1 = (pt.r1 * pt.r1 - pt.r2 * pt.r2 + pt.u * pt.u) /
                          (2.0 * pt.r1 * pt.u);
        const double c2 = (pt.r2 * pt.r2 - pt.r1 * pt.r1 + pt.u * pt.u) /
                          (2.0 * pt.r2 * pt.u);
        const double grad1 = fi.d_r1 * fj.d_r1 + fi.d_u * fj.d_u +
                             c1 * (fi.d_r1 * fj.d_u + fi.d_u * fj.d_r1);
        const double grad2 = fi.d_r2 * fj.d_r2 + fi.d_u * fj.d_u +
                             c2 * (fi.d_r2 * fj.d_u + fi.d_u * fj.d_r2);
        double pot = -spec.Z / pt.r1 - spec.Z / pt.r2;
        if (spec.interaction_on) pot += 1.0 / pt.u;
        s_ij += w * fi.value * fj.value;
        h_ij += w * (0.5 * (grad1 + grad2) + pot * fi.value * fj.value);
      }
      out.overlap(i, j) = out.overlap(j, i) = s_ij;
      out.hamiltonian(i, j) = out.hamiltonian(j, i) = h_ij;
    }
  }
  return out;
}

Eigen::MatrixXd build_overlap(int omega, double alpha,
                              const HamiltonianSpec& spec,
                              const QuadratureRule3D& rule) {
  return assemble_matrices(omega, alpha, spec, rule).overlap;
}

Eigen::MatrixXd build_hamiltonian(int omega, double alpha,
                                  const HamiltonianSpec& spec,
                                  const QuadratureRule3D& rule) {
  return assemble_matrices(omega, alpha, spec, rule).hamiltonian;
}

PencilSolution solve_generalized(const Eigen::MatrixXd& H,
                                 const Eigen::MatrixXd& S, double drop_tol) {
  const auto M = S.rows();
  if (M == 0 || S.cols() != M || H.rows() != M || H.cols() != M)
    throw std::invalid_argument("solve_generalized: shape mismatch");

  // Bring S to unit diagonal first; the raw basis spans many orders of
  // magnitude and the relative drop threshold is meaningless without this.
  Eigen::VectorXd d(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    const double sii = S(i, i);
    if (!(sii > 0.0)) {
      std::ostringstream msg;
      msg << "solve_generalized: overlap diagonal " << i
          << " not positive (" << sii << ")";
      throw std::runtime_error(msg.str());
    }
    d[i] = 1.0 / std::sqrt(sii);
  }
  const Eigen::MatrixXd Ss = d.asDiagonal() * S * d.asDiagonal();
  const Eigen::MatrixXd Hs = d.asDiagonal() * H * d.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ss);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solve_generalized: overlap eigensolve failed");
  const Eigen::VectorXd& sv = es.eigenvalues();
  const double cutoff = drop_tol * sv[M - 1];

  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < M; ++i)
    if (sv[i] >= cutoff) ++kept;
  if (kept == 0 || !(sv[M - 1] > 0.0)) {
    std::ostringstream msg;
    msg << "solve_generalized: overlap not positive definite after filtering"
        << " (smallest eigenvalue " << sv[0] << ", largest " << sv[M - 1]
        << "); basis too large for working precision";
    throw std::runtime_error(msg.str());
  }

  Eigen::MatrixXd X(M, kept);
  Eigen::Index col = 0;
  double smallest_kept = sv[M - 1];
  for (Eigen::Index i = 0; i < M; ++i) {
    if (sv[i] < cutoff) continue;
    X.col(col++) = es.eigenvectors().col(i) / std::sqrt(sv[i]);
    smallest_kept = std::min(smallest_kept, sv[i]);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(X.transpose() * Hs * X);
  if (eh.info() != Eigen::Success)
    throw std::runtime_error("solve_generalized: reduced eigensolve failed");

  PencilSolution sol;
  sol.eigenvalue = eh.eigenvalues()[0];
  sol.dropped = static_cast<int>(M - kept);
  sol.smallest_kept = smallest_kept;
  Eigen::VectorXd C = d.asDiagonal() * (X * eh.eigenvectors().col(0));
  C /= std::sqrt(C.dot(S * C));
  // fix the overall sign so repeated solves agree bit for bit
  Eigen::Index imax = 0;
  C.cwiseAbs().maxCoeff(&imax);
  if (C[imax] < 0.0) C = -C;
  sol.eigenvector = std::move(C);
  return sol;
}

namespace {

std::array<int, 3> resolve_orders(int omega, const SolveOptions& opts) {
  std::array<int, 3> orders = opts.orders;
  for (int& o : orders)
    if (o <= 0) o = default_radial_order(omega);
  return orders;
}

VariationalState state_from_solution(int omega, double alpha,
                                     const HamiltonianSpec& spec,
                                     PencilSolution sol) {
  VariationalState st;
  st.spec = spec;
  st.omega = omega;
  st.alpha = alpha;
  st.coeffs = std::move(sol.eigenvector);
  st.energy = sol.eigenvalue;
  st.norm = 1.0;
  return st;
}

}  // namespace

VariationalState solve_fixed_alpha(int omega, double alpha,
                                   const HamiltonianSpec& spec,
                                   const SolveOptions& opts) {
  const auto rule = build_rule_3d(spec.R, resolve_orders(omega, opts),
                                  PairSymmetry::exchange);
  auto [S, H] = assemble_matrices(omega, alpha, spec, rule, opts.parallel);
  return state_from_solution(omega, alpha, spec,
                             solve_generalized(H, S, opts.drop_tol));
}

VariationalState optimize_alpha(int omega, const HamiltonianSpec& spec,
                                const AlphaRange& range,
                                const SolveOptions& opts) {
  if (!(range.lo > 0.0) || !(range.hi > range.lo))
    throw std::invalid_argument("optimize_alpha: need 0 < lo < hi");

  const auto rule = build_rule_3d(spec.R, resolve_orders(omega, opts),
                                  PairSymmetry::exchange);
  auto energy_at = [&](double a) {
    auto [S, H] = assemble_matrices(omega, a, spec, rule, opts.parallel);
    return solve_generalized(H, S, opts.drop_tol).eigenvalue;
  };

  std::vector<double> grid;
  for (double a = range.lo; a <= range.hi + 1e-12; a += opts.coarse_step)
    grid.push_back(std::min(a, range.hi));
  if (grid.size() < 3)
    throw std::invalid_argument("optimize_alpha: range narrower than step");

  std::size_t best = 0;
  std::vector<double> energies(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    energies[k] = energy_at(grid[k]);
    if (energies[k] < energies[best]) best = k;
  }
  if (best == 0 || best + 1 == grid.size()) {
    std::ostringstream msg;
    msg << "optimize_alpha: minimum at range boundary alpha = " << grid[best]
        << "; widen the range [" << range.lo << ", " << range.hi << "]";
    throw AlphaBoundaryError(msg.str(), grid[best]);
  }

  // golden-section refinement inside the bracketing coarse cells
  constexpr double kGolden = 0.6180339887498949;
  double a = grid[best - 1], b = grid[best + 1];
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = energy_at(x1), f2 = energy_at(x2);
  while (b - a > opts.alpha_resolution) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = energy_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = energy_at(x2);
    }
  }

  const double alpha_star = 0.5 * (a + b);
  auto [S, H] = assemble_matrices(omega, alpha_star, spec, rule, opts.parallel);
  return state_from_solution(omega, alpha_star, spec,
                             solve_generalized(H, S, opts.drop_tol));
}

}  // namespace confhe
