#include "confhe/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace confhe {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  const auto n = x_.size();
  if (n < 3 || y_.size() != n)
    throw std::invalid_argument("CubicSpline: need >= 3 matching points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw std::invalid_argument("CubicSpline: abscissae must increase");

  // tridiagonal system for the knot second derivatives, natural ends
  m_.assign(n, 0.0);
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  diag[0] = diag[n - 1] = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1];
    const double hr = x_[i + 1] - x_[i];
    diag[i] = 2.0 * (hl + hr);
    upper[i] = hr;
    rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
  }
  // forward sweep (lower diagonal of row i is hl, zero in rows 0 and n-1)
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1];
    const double f = hl / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i)
    m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
}

int CubicSpline::interval(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  auto i = static_cast<int>(it - x_.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(x_.size()) - 2);
}

double CubicSpline::operator()(double x) const {
  const auto i = static_cast<std::size_t>(interval(x));
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::second_derivative(double x) const {
  const auto i = static_cast<std::size_t>(interval(x));
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * m_[i] + b * m_[i + 1];
}

namespace {

// Exact zeros count as non-negative: a natural spline always has f'' = 0
// at its end knots, which must not register as inflections.
template <typename F>
std::optional<double> first_sign_change(const F& f, std::span<const double> knots) {
  bool prev_neg = f(knots[0]) < 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const bool cur_neg = f(knots[i]) < 0.0;
    if (prev_neg != cur_neg) {
      double lo = knots[i - 1], hi = knots[i];
      for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(hi));
           ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == prev_neg)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev_neg = cur_neg;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> CubicSpline::first_root() const {
  return first_sign_change([this](double x) { return (*this)(x); }, x_);
}

std::optional<double> CubicSpline::first_inflection() const {
  // f'' is piecewise linear through the knot values, so checking the
  // knots catches every sign change
  return first_sign_change(
      [this](double x) { return second_derivative(x); }, x_);
}

}  // namespace confhe
