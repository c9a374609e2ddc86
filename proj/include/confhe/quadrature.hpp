#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "confhe/basis.hpp"

namespace confhe {

/// Gauss-Legendre nodes and weights on (-1, 1), Newton-refined to
/// machine precision. Exact for polynomials up to degree 2n-1.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Legendre polynomial P_l(x) by the three-term recurrence.
double legendre_p(int l, double x);

enum class PairSymmetry {
  none,      // nodes cover both r2 < r1 and r2 > r1 triangles
  exchange,  // r2 < r1 only, off-diagonal weights doubled; valid for
             // integrands symmetric under r1 <-> r2
};

/// Tensor Gauss-Legendre rule over the confined two-electron S-state
/// domain 0 < r1 < R, 0 < r2 < R, |r1 - r2| < u < r1 + r2. Weights carry
/// the full volume factor 8 pi^2 r1 r2 u.
///
/// The r2 panels are split at r2 = r1 and the u interval is mapped per
/// (r1, r2) pair, so the |r1 - r2| kink left behind by the u limits never
/// crosses a quadrature panel and polynomial integrands integrate exactly.
struct QuadratureRule3D {
  double R = 0.0;
  std::array<int, 3> orders{};  // (N_r1, N_r2, N_u)
  PairSymmetry symmetry = PairSymmetry::none;
  std::vector<double> r1, r2, u, w;

  std::size_t size() const { return w.size(); }
  HylleraasPoint node(std::size_t i) const { return {r1[i], r2[i], u[i]}; }
};

QuadratureRule3D build_rule_3d(double R, std::array<int, 3> orders,
                               PairSymmetry symmetry = PairSymmetry::none);

/// Default per-dimension order, 24 + 4*omega: the integrands are
/// exponentials times polynomials of degree growing with omega.
int default_radial_order(int omega);

/// Gauss-Legendre rule for the inter-electron angle integral
/// over t = cos(theta) in (-1, 1).
struct AngleRule {
  std::vector<double> t;
  std::vector<double> w;
  static AngleRule gauss(int n);
  int size() const { return static_cast<int>(t.size()); }
};

/// ((2l+1)/2) sum_k w_k P_l(t_k) values_k -- the Legendre projection of a
/// function sampled at the rule's nodes, without any radial prefactor.
double legendre_project(std::span<const double> values, int l,
                        const AngleRule& rule);

}  // namespace confhe
