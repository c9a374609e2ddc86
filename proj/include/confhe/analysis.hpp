#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "confhe/entropy.hpp"
#include "confhe/schmidt.hpp"
#include "confhe/solver.hpp"

namespace confhe {

struct ConvergenceTargets {
  double energy_tol = 1e-5;   // hartree
  double entropy_tol = 1e-5;  // on S_vN and L
};

struct ConvergeOptions {
  int omega_start = 3;
  int omega_cap = 7;
  int n_m = 301;
  int n_m_cap = 1201;
  int l_m = 18;
  int l_m_cap = 24;
  int angle_nodes = 64;
  AlphaRange alpha_range{};
  double deficit_tol = 1e-4;
  bool parallel = true;
};

/// One radius point of a sweep.
struct ScanRecord {
  double R = 0.0;
  int omega = 0;
  double alpha = 0.0;
  double E0 = 0.0;    // hartree
  double S_vN = 0.0;  // bits
  double L = 0.0;
  double prob_sum = 0.0;
  int n_m = 0;
  int l_m = 0;
  double seconds = 0.0;
  bool converged = true;  // not serialized; caps hit if false
};

struct ConvergedPoint {
  ScanRecord record;
  VariationalState state;
};

/// Escalates omega until successive E0, S_vN and L changes fall below the
/// targets, then confirms stability against an n_m doubling and an l_m
/// bump, escalating those too if needed. A point that still moves at the
/// caps comes back with converged = false rather than throwing.
ConvergedPoint converge_point_full(double R, const ConvergenceTargets& = {},
                                   const ConvergeOptions& = {});
ScanRecord converge_point(double R, const ConvergenceTargets& = {},
                          const ConvergeOptions& = {});

/// Per-point converge_point over an ascending list of radii; output order
/// matches input and per-point convergence flags propagate without
/// aborting the sweep.
std::vector<ScanRecord> scan(std::span<const double> radii,
                             const ConvergenceTargets& = {},
                             const ConvergeOptions& = {});

/// R grid behind the entropy-vs-R curve: dense where the curvature
/// changes, sparse in the saturated region.
std::vector<double> default_radius_grid();

/// Smallest radius the sweep machinery has been exercised at.
inline constexpr double kMinValidatedRadius = 0.125;

struct CurveAnalysis {
  std::optional<double> inflection_R_SvN;
  std::optional<double> inflection_R_L;
  std::optional<double> critical_R;  // E0 = 0 crossing
  double rescale_factor = 0.0;       // least-squares c in S_vN ~ c L
};

/// Natural-spline interpolation of S_vN(R), L(R), E0(R) with bisection
/// roots of the second derivatives (inflections) and of E0 (ionization
/// radius). Requires >= 8 records covering [0.5, 5] with knot spacing
/// <= 0.25 on [0.5, 1.5]. Roots that do not exist in range are left empty.
CurveAnalysis analyze_curve(std::span<const ScanRecord> records);

/// CSV with columns R, omega, alpha, E0, S_vN, L, prob_sum, n_m, l_m,
/// seconds; floats carry 9 significant digits.
void write_csv(std::ostream& os, std::span<const ScanRecord> records);
std::vector<ScanRecord> read_csv(std::istream& is);

/// %.9g-style formatting used for all serialized floating-point fields.
std::string format_double(double v, int significant = 9);

}  // namespace confhe
