#pragma once

#include <optional>
#include <span>
#include <vector>

namespace confhe {

/// Natural cubic spline (zero second derivative at both ends) through
/// strictly increasing abscissae.
class CubicSpline {
 public:
  CubicSpline(std::span<const double> x, std::span<const double> y);

  double operator()(double x) const;
  double second_derivative(double x) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

  /// Leftmost zero of the spline itself, by bisection on sign changes
  /// across the knot intervals.
  std::optional<double> first_root() const;

  /// Leftmost zero of the (piecewise linear) second derivative.
  std::optional<double> first_inflection() const;

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives at the knots
  int interval(double x) const;
};

}  // namespace confhe
