#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "confhe/quadrature.hpp"
#include "confhe/solver.hpp"

namespace confhe {

/// psi(r1, r2, cos theta) for a finalized state; exactly zero at the walls.
double evaluate_psi(const VariationalState& state, double r1, double r2,
                    double t);

/// Cache of psi over a (radial x radial x angle) lattice. Exchange
/// symmetry lets it store the i <= j triangle only; every (i, j, t_k)
/// value is computed once and shared across all angular momenta l.
class PsiLattice {
 public:
  PsiLattice(const VariationalState& state, std::vector<double> radial,
             AngleRule angle, bool parallel = true);

  double R() const { return R_; }
  const std::vector<double>& radial() const { return radial_; }
  const AngleRule& angle() const { return angle_; }

  double operator()(int i, int j, int k) const {
    return values_[offset(i, j) + static_cast<std::size_t>(k)];
  }
  /// The angle_nodes values psi(r_i, r_j, t_0..t_{K-1}).
  std::span<const double> row(int i, int j) const {
    return {values_.data() + offset(i, j),
            static_cast<std::size_t>(angle_.size())};
  }

 private:
  std::size_t offset(int i, int j) const {
    if (i > j) std::swap(i, j);
    const auto J = static_cast<std::size_t>(j);
    return (J * (J + 1) / 2 + static_cast<std::size_t>(i)) *
           static_cast<std::size_t>(angle_.size());
  }

  double R_;
  std::vector<double> radial_;
  AngleRule angle_;
  std::vector<double> values_;
};

/// Serial reference for the lattice builder: plain evaluate_psi per node.
std::vector<double> psi_lattice_reference(const VariationalState& state,
                                          std::span<const double> radial,
                                          const AngleRule& angle);

/// Discretized radial kernel f_l(r_i, r_j) = r_i r_j (2l+1)/2
/// int_{-1}^{1} psi(r_i, r_j, t) P_l(t) dt on a uniform grid including
/// both endpoints, where its rows vanish.
struct RadialKernel {
  int l = 0;
  double R = 0.0;
  std::vector<double> grid;  // n_m uniform points, r_i = i R/(n_m - 1)
  Eigen::MatrixXd values;    // symmetric n_m x n_m
};

/// Kernel values at the lattice's own radial nodes (any grid).
Eigen::MatrixXd kernel_matrix(const PsiLattice& lattice, int l);

/// Kernel on the uniform n_m grid via a shared lattice...
RadialKernel build_kernel(const PsiLattice& lattice, int l);
/// ...or standalone (builds a single-use lattice internally).
RadialKernel build_kernel(const VariationalState& state, int l, int n_m,
                          const AngleRule& angle);

/// Eigenvalues of the quadrature-discretized integral operator
/// int_0^R f_l(r, r') v(r') dr' = k v(r), sorted by descending |k|.
/// The two wall rows carry half weight; for kernels vanishing there this
/// is identical to the plain [dr f_l(i dr, j dr)] matrix. Eigenvectors,
/// if requested, approximate v_nl on the grid and vanish at r = 0, R.
std::vector<double> nystrom_spectrum(const RadialKernel& kernel,
                                     Eigen::MatrixXd* eigenvectors = nullptr);

/// Cross-check route: eigenvalues of the projection of f_l onto the
/// orthonormal sine basis u_i(r) = sqrt(2/R) sin(i pi r / R), i = 1..n_sine,
/// with Gauss-Legendre quadrature in both radial variables.
/// n_quad = 0 picks 2 n_sine + 40 radial nodes.
std::vector<double> sine_basis_spectrum(const VariationalState& state, int l,
                                        int n_sine, const AngleRule& angle,
                                        int n_quad = 0);

/// Same projection for an explicit kernel sampled on the Gauss radial
/// grid; test hook for synthetic kernels.
std::vector<double> sine_spectrum_of_kernel(const Eigen::MatrixXd& values,
                                            std::span<const double> nodes,
                                            std::span<const double> weights,
                                            double R, int n_sine);

/// lambda = (4 pi k / (2l+1))^2; sign of k is squared away.
std::vector<double> lambdas_from_k(std::span<const double> k, int l);

struct SchmidtEntry {
  int n = 0;
  int l = 0;
  double lambda = 0.0;
};

/// The set {(n, l, lambda_nl)} with its (2l+1)-degeneracy-weighted
/// probability sum. Entries are sorted by descending lambda within each l.
struct SchmidtSpectrum {
  std::vector<SchmidtEntry> entries;
  int n_m = 0;
  int l_m = 0;
  double probability_sum = 0.0;
  double deficit() const { return 1.0 - probability_sum; }
};

struct SpectrumOptions {
  int n_m = 301;
  int l_m = 18;
  int angle_nodes = 64;
  double keep_floor = 1e-18;  // lambdas below this are not stored
  bool parallel = true;
};

SchmidtSpectrum schmidt_spectrum(const VariationalState& state,
                                 const SpectrumOptions& opts = {});

/// Self-describing text dump of a kernel and its Nystrom eigenvalues.
void dump_kernel(std::ostream& os, const RadialKernel& kernel,
                 std::span<const double> k_values);

}  // namespace confhe
