#include "confhe/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace confhe {

namespace {

// Power tables up to a fixed maximum order keep eval_all allocation-free.
constexpr int kMaxOmega = 32;

void check_omega(int omega) {
  if (omega < 0) throw std::invalid_argument("basis order must be >= 0");
  if (omega > kMaxOmega)
    throw std::invalid_argument("basis order larger than supported maximum");
}

}  // namespace

double HylleraasPoint::cos_theta() const {
  const double denom = 2.0 * r1 * r2;
  if (denom <= 0.0) return 1.0;
  return std::clamp((r1 * r1 + r2 * r2 - u * u) / denom, -1.0, 1.0);
}

bool HylleraasPoint::valid(double R) const {
  return r1 >= 0.0 && r1 <= R && r2 >= 0.0 && r2 <= R &&
         u >= std::abs(r1 - r2) && u <= r1 + r2;
}

std::vector<BasisIndex> enumerate_basis(int omega) {
  check_omega(omega);
  std::vector<BasisIndex> out;
  out.reserve(basis_size(omega));
  for (int degree = 0; degree <= omega; ++degree)
    for (int n = degree; n >= 0; --n)
      for (int m = degree - n; m >= 0; --m)
        out.push_back({n, m, degree - n - m});
  return out;
}

std::size_t basis_size(int omega) {
  check_omega(omega);
  const auto w = static_cast<std::size_t>(omega);
  return (w + 1) * (w + 2) * (w + 3) / 6;
}

BasisEval eval_basis(const BasisIndex& idx, double alpha, double R,
                     const HylleraasPoint& pt) {
  const double s = pt.s();
  const double t = pt.t();
  const double tau = t * t;
  const double u = pt.u;

  auto ipow = [](double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  };

  const double P = ipow(s, idx.n) * ipow(tau, idx.m) * ipow(u, idx.p);
  const double Ps = idx.n > 0
                        ? idx.n * ipow(s, idx.n - 1) * ipow(tau, idx.m) *
                              ipow(u, idx.p)
                        : 0.0;
  // d/dt t^{2m} = 2m t^{2m-1}
  const double Pt = idx.m > 0
                        ? 2.0 * idx.m * ipow(s, idx.n) * t *
                              ipow(tau, idx.m - 1) * ipow(u, idx.p)
                        : 0.0;
  const double Pu = idx.p > 0
                        ? idx.p * ipow(s, idx.n) * ipow(tau, idx.m) *
                              ipow(u, idx.p - 1)
                        : 0.0;

  const double ex = std::exp(-alpha * s);
  const double c1 = R - pt.r1;
  const double c2 = R - pt.r2;
  const double cut = c1 * c2;

  BasisEval e;
  e.value = cut * ex * P;
  // chain rule through s = r1 + r2, t = r1 - r2
  e.d_r1 = -c2 * ex * P + cut * ex * (-alpha * P + Ps + Pt);
  e.d_r2 = -c1 * ex * P + cut * ex * (-alpha * P + Ps - Pt);
  e.d_u = cut * ex * Pu;
  return e;
}

BasisSet::BasisSet(int omega) : omega_(omega), indices_(enumerate_basis(omega)) {}

void BasisSet::eval_all(double alpha, double R, const HylleraasPoint& pt,
                        std::span<double> values, std::span<double> d_r1,
                        std::span<double> d_r2, std::span<double> d_u) const {
  const double s = pt.s();
  const double t = pt.t();
  const double tau = t * t;
  const double u = pt.u;

  double pow_s[kMaxOmega + 1], pow_tau[kMaxOmega + 1], pow_u[kMaxOmega + 1];
  pow_s[0] = pow_tau[0] = pow_u[0] = 1.0;
  for (int k = 1; k <= omega_; ++k) {
    pow_s[k] = pow_s[k - 1] * s;
    pow_tau[k] = pow_tau[k - 1] * tau;
    pow_u[k] = pow_u[k - 1] * u;
  }

  const double ex = std::exp(-alpha * s);
  const double c1 = R - pt.r1;
  const double c2 = R - pt.r2;
  const double cut = c1 * c2;
  const double cut_ex = cut * ex;

  for (std::size_t k = 0; k < indices_.size(); ++k) {
    const auto [n, m, p] = indices_[k];
    const double P = pow_s[n] * pow_tau[m] * pow_u[p];
    const double Ps = n > 0 ? n * pow_s[n - 1] * pow_tau[m] * pow_u[p] : 0.0;
    const double Pt =
        m > 0 ? 2.0 * m * pow_s[n] * t * pow_tau[m - 1] * pow_u[p] : 0.0;
    const double Pu = p > 0 ? p * pow_s[n] * pow_tau[m] * pow_u[p - 1] : 0.0;
    values[k] = cut_ex * P;
    d_r1[k] = -c2 * ex * P + cut_ex * (-alpha * P + Ps + Pt);
    d_r2[k] = -c1 * ex * P + cut_ex * (-alpha * P + Ps - Pt);
    d_u[k] = cut_ex * Pu;
  }
}

}  // namespace confhe
