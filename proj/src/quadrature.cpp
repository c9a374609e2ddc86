#include "confhe/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace confhe {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return {std::move(x), std::move(w)};
}

double legendre_p(int l, double x) {
  if (l < 0) throw std::invalid_argument("legendre_p: l must be >= 0");
  if (l == 0) return 1.0;
  double pm1 = 1.0, p = x;
  for (int k = 2; k <= l; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
    pm1 = p;
    p = pk;
  }
  return p;
}

int default_radial_order(int omega) { return 24 + 4 * omega; }

QuadratureRule3D build_rule_3d(double R, std::array<int, 3> orders,
                               PairSymmetry symmetry) {
  if (!(R > 0.0)) throw std::invalid_argument("build_rule_3d: R must be > 0");
  for (int o : orders)
    if (o < 2) throw std::invalid_argument("build_rule_3d: orders must be >= 2");

  const auto [x1, w1] = gauss_legendre(orders[0]);
  const auto [x2, w2] = gauss_legendre(orders[1]);
  const auto [xu, wu] = gauss_legendre(orders[2]);

  QuadratureRule3D rule;
  rule.R = R;
  rule.orders = orders;
  rule.symmetry = symmetry;
  const std::size_t pairs_per_r1 =
      static_cast<std::size_t>(orders[1]) * (symmetry == PairSymmetry::none ? 2 : 1);
  const std::size_t total = static_cast<std::size_t>(orders[0]) *
                            pairs_per_r1 * static_cast<std::size_t>(orders[2]);
  rule.r1.reserve(total);
  rule.r2.reserve(total);
  rule.u.reserve(total);
  rule.w.reserve(total);

  constexpr double eight_pi_sq = 8.0 * std::numbers::pi * std::numbers::pi;

  auto add_pair = [&](double r1v, double wr1, double r2v, double wr2,
                      double mult) {
    const double lo = std::abs(r1v - r2v);
    const double hi = r1v + r2v;
    const double mid = 0.5 * (hi + lo);
    const double haf = 0.5 * (hi - lo);
    const double base = mult * wr1 * wr2 * eight_pi_sq * r1v * r2v;
    for (int c = 0; c < orders[2]; ++c) {
      const double uu = mid + haf * xu[c];
      rule.r1.push_back(r1v);
      rule.r2.push_back(r2v);
      rule.u.push_back(uu);
      rule.w.push_back(base * haf * wu[c] * uu);
    }
  };

  for (int a = 0; a < orders[0]; ++a) {
    const double r1v = 0.5 * R * (x1[a] + 1.0);
    const double wr1 = 0.5 * R * w1[a];
    // lower triangle r2 in (0, r1); doubled under exchange symmetry
    const double mult = symmetry == PairSymmetry::exchange ? 2.0 : 1.0;
    for (int b = 0; b < orders[1]; ++b) {
      const double r2v = 0.5 * r1v * (x2[b] + 1.0);
      const double wr2 = 0.5 * r1v * w2[b];
      add_pair(r1v, wr1, r2v, wr2, mult);
    }
    if (symmetry == PairSymmetry::none) {
      // upper triangle r2 in (r1, R)
      for (int b = 0; b < orders[1]; ++b) {
        const double r2v = r1v + 0.5 * (R - r1v) * (x2[b] + 1.0);
        const double wr2 = 0.5 * (R - r1v) * w2[b];
        add_pair(r1v, wr1, r2v, wr2, 1.0);
      }
    }
  }
  return rule;
}

AngleRule AngleRule::gauss(int n) {
  auto [x, w] = gauss_legendre(n);
  return AngleRule{std::move(x), std::move(w)};
}

double legendre_project(std::span<const double> values, int l,
                        const AngleRule& rule) {
  if (l < 0) throw std::invalid_argument("legendre_project: l must be >= 0");
  if (rule.size() < l + 1)
    throw std::invalid_argument("legendre_project: rule too short for l");
  if (values.size() != static_cast<std::size_t>(rule.size()))
    throw std::invalid_argument("legendre_project: size mismatch");
  double acc = 0.0;
  for (int k = 0; k < rule.size(); ++k)
    acc += rule.w[k] * legendre_p(l, rule.t[k]) * values[k];
  return 0.5 * (2.0 * l + 1.0) * acc;
}

}  // namespace confhe
