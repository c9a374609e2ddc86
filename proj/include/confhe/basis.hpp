#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace confhe {

/// Exponent triple (n, m, p) of one Hylleraas term s^n t^{2m} u^p.
struct BasisIndex {
  int n = 0;
  int m = 0;
  int p = 0;
  bool operator==(const BasisIndex&) const = default;
};

/// A point of the two-electron S-state configuration space in the
/// coordinates (r1, r2, u), with u the inter-electron distance.
/// Valid points satisfy 0 <= r1, r2 <= R and |r1 - r2| <= u <= r1 + r2.
struct HylleraasPoint {
  double r1 = 0.0;
  double r2 = 0.0;
  double u = 0.0;

  double s() const { return r1 + r2; }
  double t() const { return r1 - r2; }
  /// cos of the inter-electron angle, (r1^2 + r2^2 - u^2) / (2 r1 r2).
  /// Clamped to [-1, 1]; returns 1 at the degenerate origin r1 r2 = 0.
  double cos_theta() const;
  bool valid(double R) const;
};

/// All triples with n + m + p <= omega in graded lexicographic order:
/// ascending total degree, and within a degree n descending, then m
/// descending. Length is (omega+1)(omega+2)(omega+3)/6.
std::vector<BasisIndex> enumerate_basis(int omega);

/// (omega+1)(omega+2)(omega+3)/6 without enumerating.
std::size_t basis_size(int omega);

/// Value and first derivatives of one basis function
///   phi = (R - r1)(R - r2) e^{-alpha s} s^n t^{2m} u^p
/// carried in the (r1, r2, u) variables.
struct BasisEval {
  double value = 0.0;
  double d_r1 = 0.0;
  double d_r2 = 0.0;
  double d_u = 0.0;
};

/// Evaluate a single basis function. 0^0 counts as 1, so the constant
/// term stays finite on the coordinate edges s = 0, t = 0, u = 0.
BasisEval eval_basis(const BasisIndex& idx, double alpha, double R,
                     const HylleraasPoint& pt);

/// An enumerated basis of fixed order with a bulk evaluator that shares
/// the power tables across all terms. Stateless after construction;
/// eval_all is safe to call concurrently.
class BasisSet {
 public:
  explicit BasisSet(int omega);

  int omega() const { return omega_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<BasisIndex>& indices() const { return indices_; }

  /// Fill values and the three partial derivatives for every term at pt.
  /// All four spans must have size() elements.
  void eval_all(double alpha, double R, const HylleraasPoint& pt,
                std::span<double> values, std::span<double> d_r1,
                std::span<double> d_r2, std::span<double> d_u) const;

 private:
  int omega_;
  std::vector<BasisIndex> indices_;
};

}  // namespace confhe
