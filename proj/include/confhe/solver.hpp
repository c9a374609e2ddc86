#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>

#include "confhe/basis.hpp"
#include "confhe/quadrature.hpp"

namespace confhe {

/// Radius used for the "free atom" mode: beyond R ~ 5 the confined system
/// is numerically indistinguishable from the unconfined one, so the free
/// limit reuses the confined code path with the cutoff factors retained.
inline constexpr double kFreeAtomRadius = 15.0;

struct HamiltonianSpec {
  double R = kFreeAtomRadius;   // cavity radius (bohr)
  double Z = 2.0;               // nuclear charge
  bool interaction_on = true;   // include the 1/r12 term

  static HamiltonianSpec confined(double R);
  static HamiltonianSpec free_atom();
};

struct MatrixPair {
  Eigen::MatrixXd overlap;
  Eigen::MatrixXd hamiltonian;
};

/// One-pass assembly of the overlap and Hamiltonian matrices over
/// enumerate_basis(omega). The kinetic part uses the symmetric gradient
/// form with the S-state identity
///   grad1 f . grad1 g = f_r1 g_r1 + f_u g_u
///                       + (r1^2 - r2^2 + u^2)/(2 r1 u) (f_r1 g_u + f_u g_r1)
/// and its 1<->2 counterpart. The hard wall enters only through the basis
/// cutoff factors; no explicit wall term exists.
///
/// OpenMP-parallel over quadrature nodes; per-thread partial sums are
/// reduced in thread order so results are reproducible for a fixed
/// thread count. parallel=false runs the same kernel single-threaded.
MatrixPair assemble_matrices(int omega, double alpha,
                             const HamiltonianSpec& spec,
                             const QuadratureRule3D& rule,
                             bool parallel = true);

/// Naive per-pair reference assembly (direct eval_basis calls, no shared
/// tables). Kept as the serial oracle for the optimized kernel; use small
/// omega and orders only.
MatrixPair assemble_matrices_reference(int omega, double alpha,
                                       const HamiltonianSpec& spec,
                                       const QuadratureRule3D& rule);

Eigen::MatrixXd build_overlap(int omega, double alpha,
                              const HamiltonianSpec& spec,
                              const QuadratureRule3D& rule);
Eigen::MatrixXd build_hamiltonian(int omega, double alpha,
                                  const HamiltonianSpec& spec,
                                  const QuadratureRule3D& rule);

struct PencilSolution {
  double eigenvalue = 0.0;
  Eigen::VectorXd eigenvector;  // normalized so that C^T S C = 1
  int dropped = 0;              // near-dependent directions projected out
  double smallest_kept = 0.0;   // smallest retained eigenvalue of scaled S
};

/// Smallest eigenpair of the symmetric pencil (H, S). S is brought to
/// unit diagonal first, its spectrum below drop_tol * max is projected
/// out, and the reduced standard problem is solved and back-transformed.
/// Throws std::runtime_error if S is not positive definite after the
/// conditioning filter.
PencilSolution solve_generalized(const Eigen::MatrixXd& H,
                                 const Eigen::MatrixXd& S,
                                 double drop_tol = 1e-12);

struct VariationalState {
  HamiltonianSpec spec;
  int omega = 0;
  double alpha = 0.0;
  Eigen::VectorXd coeffs;  // over enumerate_basis(omega), C^T S C = 1
  double energy = 0.0;     // smallest generalized eigenvalue (hartree)
  double norm = 1.0;
};

struct AlphaRange {
  double lo = 0.2;
  double hi = 4.0;
};

/// The coarse alpha scan bottomed out on a range edge; the caller must
/// widen the range. Carries the offending boundary value.
class AlphaBoundaryError : public std::runtime_error {
 public:
  AlphaBoundaryError(const std::string& what, double boundary)
      : std::runtime_error(what), boundary_alpha(boundary) {}
  double boundary_alpha;
};

struct SolveOptions {
  std::array<int, 3> orders{0, 0, 0};  // 0 -> default_radial_order(omega)
  double coarse_step = 0.1;
  double alpha_resolution = 1e-3;
  double drop_tol = 1e-12;
  bool parallel = true;
};

/// Solve at a fixed nonlinear parameter.
VariationalState solve_fixed_alpha(int omega, double alpha,
                                   const HamiltonianSpec& spec,
                                   const SolveOptions& opts = {});

/// Coarse alpha scan (coarse_step granularity) followed by golden-section
/// refinement to |d alpha| <= alpha_resolution. Throws std::runtime_error
/// if the scan minimum sits on a range boundary.
VariationalState optimize_alpha(int omega, const HamiltonianSpec& spec,
                                const AlphaRange& range = {},
                                const SolveOptions& opts = {});

}  // namespace confhe
