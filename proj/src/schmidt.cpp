#include "confhe/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "confhe/entropy.hpp"

namespace confhe {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

std::vector<double> uniform_grid(double R, int n_m) {
  if (n_m < 3) throw std::invalid_argument("need n_m >= 3");
  std::vector<double> g(static_cast<std::size_t>(n_m));
  const double dr = R / (n_m - 1);
  for (int i = 0; i < n_m; ++i) g[static_cast<std::size_t>(i)] = i * dr;
  g.back() = R;
  return g;
}

// coefficients grouped by the u power so the angle loop reduces to a
// Horner evaluation per node
struct CollapsedTerms {
  struct Term {
    int n, m;
    double c;
  };
  std::vector<std::vector<Term>> by_p;  // index p = 0..omega
};

CollapsedTerms collapse_by_p(const VariationalState& state) {
  CollapsedTerms ct;
  ct.by_p.resize(static_cast<std::size_t>(state.omega) + 1);
  const auto idx = enumerate_basis(state.omega);
  for (std::size_t k = 0; k < idx.size(); ++k)
    ct.by_p[static_cast<std::size_t>(idx[k].p)].push_back(
        {idx[k].n, idx[k].m, state.coeffs[static_cast<Eigen::Index>(k)]});
  return ct;
}

}  // namespace

double evaluate_psi(const VariationalState& state, double r1, double r2,
                    double t) {
  const double u =
      std::sqrt(std::max(0.0, r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * t));
  const auto idx = enumerate_basis(state.omega);
  double acc = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k)
    acc += state.coeffs[static_cast<Eigen::Index>(k)] *
           eval_basis(idx[k], state.alpha, state.spec.R, {r1, r2, u}).value;
  return acc;
}

PsiLattice::PsiLattice(const VariationalState& state,
                       std::vector<double> radial, AngleRule angle,
                       bool parallel)
    : R_(state.spec.R), radial_(std::move(radial)), angle_(std::move(angle)) {
  const auto nr = static_cast<std::ptrdiff_t>(radial_.size());
  const int K = angle_.size();
  values_.assign(static_cast<std::size_t>(nr) * (nr + 1) / 2 *
                     static_cast<std::size_t>(K),
                 0.0);

  const CollapsedTerms ct = collapse_by_p(state);
  const int omega = state.omega;
  const double alpha = state.alpha;
  const double R = R_;

  // disjoint writes per (i, j) slot: dynamic scheduling stays deterministic
  // and balances the triangle's growing row lengths
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (std::ptrdiff_t j = 0; j < nr; ++j) {
    std::vector<double> a_p(static_cast<std::size_t>(omega) + 1);
    std::vector<double> pow_s(static_cast<std::size_t>(omega) + 1, 1.0);
    std::vector<double> pow_tau(static_cast<std::size_t>(omega) + 1, 1.0);
    for (std::ptrdiff_t i = 0; i <= j; ++i) {
      const double ri = radial_[static_cast<std::size_t>(i)];
      const double rj = radial_[static_cast<std::size_t>(j)];
      const double s = ri + rj;
      const double tau = (ri - rj) * (ri - rj);
      for (int k = 1; k <= omega; ++k) {
        pow_s[static_cast<std::size_t>(k)] =
            pow_s[static_cast<std::size_t>(k - 1)] * s;
        pow_tau[static_cast<std::size_t>(k)] =
            pow_tau[static_cast<std::size_t>(k - 1)] * tau;
      }
      for (int p = 0; p <= omega; ++p) {
        double acc = 0.0;
        for (const auto& term : ct.by_p[static_cast<std::size_t>(p)])
          acc += term.c * pow_s[static_cast<std::size_t>(term.n)] *
                 pow_tau[static_cast<std::size_t>(term.m)];
        a_p[static_cast<std::size_t>(p)] = acc;
      }
      const double cut_ex = (R - ri) * (R - rj) * std::exp(-alpha * s);
      double* out =
          values_.data() +
          (static_cast<std::size_t>(j) * (static_cast<std::size_t>(j) + 1) /
               2 +
           static_cast<std::size_t>(i)) *
              static_cast<std::size_t>(K);
      const double two_rirj = 2.0 * ri * rj;
      const double rr = ri * ri + rj * rj;
      for (int k = 0; k < K; ++k) {
        const double uu = std::sqrt(std::max(0.0, rr - two_rirj * angle_.t[static_cast<std::size_t>(k)]));
        double horner = a_p[static_cast<std::size_t>(omega)];
        for (int p = omega - 1; p >= 0; --p)
          horner = horner * uu + a_p[static_cast<std::size_t>(p)];
        out[k] = cut_ex * horner;
      }
    }
  }
}

std::vector<double> psi_lattice_reference(const VariationalState& state,
                                          std::span<const double> radial,
                                          const AngleRule& angle) {
  const auto nr = radial.size();
  const auto K = static_cast<std::size_t>(angle.size());
  std::vector<double> out(nr * (nr + 1) / 2 * K);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < nr; ++j)
    for (std::size_t i = 0; i <= j; ++i)
      for (std::size_t k = 0; k < K; ++k)
        out[pos++] = evaluate_psi(state, radial[i], radial[j], angle.t[k]);
  return out;
}

Eigen::MatrixXd kernel_matrix(const PsiLattice& lattice, int l) {
  const auto& r = lattice.radial();
  const auto& angle = lattice.angle();
  const int K = angle.size();
  if (K < l + 1)
    throw std::invalid_argument("kernel_matrix: angle rule too short for l");
  const auto n = static_cast<int>(r.size());

  // fold the (2l+1)/2 projection prefactor into the angle weights
  std::vector<double> wp(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k)
    wp[static_cast<std::size_t>(k)] = 0.5 * (2.0 * l + 1.0) *
                                      angle.w[static_cast<std::size_t>(k)] *
                                      legendre_p(l, angle.t[static_cast<std::size_t>(k)]);

  Eigen::MatrixXd F(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      const auto row = lattice.row(i, j);
      double acc = 0.0;
      for (int k = 0; k < K; ++k)
        acc += wp[static_cast<std::size_t>(k)] * row[static_cast<std::size_t>(k)];
      const double v = r[static_cast<std::size_t>(i)] *
                       r[static_cast<std::size_t>(j)] * acc;
      F(i, j) = v;
      F(j, i) = v;
    }
  return F;
}

RadialKernel build_kernel(const PsiLattice& lattice, int l) {
  RadialKernel kern;
  kern.l = l;
  kern.R = lattice.R();
  kern.grid = lattice.radial();
  kern.values = kernel_matrix(lattice, l);
  return kern;
}

RadialKernel build_kernel(const VariationalState& state, int l, int n_m,
                          const AngleRule& angle) {
  const PsiLattice lattice(state, uniform_grid(state.spec.R, n_m), angle);
  return build_kernel(lattice, l);
}

std::vector<double> nystrom_spectrum(const RadialKernel& kernel,
                                     Eigen::MatrixXd* eigenvectors) {
  const auto n = kernel.values.rows();
  if (n < 3 || kernel.values.cols() != n)
    throw std::invalid_argument("nystrom_spectrum: malformed kernel");
  const double dr = kernel.grid[1] - kernel.grid[0];

  // symmetrized D^{1/2} F D^{1/2} with trapezoid end weights
  Eigen::VectorXd sq(n);
  for (Eigen::Index i = 0; i < n; ++i)
    sq[i] = std::sqrt((i == 0 || i == n - 1) ? 0.5 * dr : dr);
  const Eigen::MatrixXd A = sq.asDiagonal() * kernel.values * sq.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      A, eigenvectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("nystrom_spectrum: eigensolve failed");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
  });

  std::vector<double> k(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < k.size(); ++i)
    k[i] = es.eigenvalues()[order[i]];
  if (eigenvectors) {
    eigenvectors->resize(n, n);
    for (std::size_t i = 0; i < k.size(); ++i)
      eigenvectors->col(static_cast<Eigen::Index>(i)) =
          es.eigenvectors().col(order[i]);
  }
  return k;
}

std::vector<double> sine_spectrum_of_kernel(const Eigen::MatrixXd& values,
                                            std::span<const double> nodes,
                                            std::span<const double> weights,
                                            double R, int n_sine) {
  const auto nq = static_cast<Eigen::Index>(nodes.size());
  if (values.rows() != nq || values.cols() != nq ||
      weights.size() != nodes.size())
    throw std::invalid_argument("sine_spectrum_of_kernel: size mismatch");
  if (n_sine < 1)
    throw std::invalid_argument("sine_spectrum_of_kernel: n_sine >= 1");

  Eigen::MatrixXd U(nq, n_sine);  // w_a u_i(r_a)
  const double norm = std::sqrt(2.0 / R);
  for (Eigen::Index a = 0; a < nq; ++a)
    for (int i = 1; i <= n_sine; ++i)
      U(a, i - 1) = weights[static_cast<std::size_t>(a)] * norm *
                    std::sin(i * std::numbers::pi *
                             nodes[static_cast<std::size_t>(a)] / R);

  const Eigen::MatrixXd B = U.transpose() * values * U;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (B + B.transpose()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sine_spectrum_of_kernel: eigensolve failed");

  std::vector<double> k(static_cast<std::size_t>(n_sine));
  for (int i = 0; i < n_sine; ++i) k[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  std::sort(k.begin(), k.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  return k;
}

std::vector<double> sine_basis_spectrum(const VariationalState& state, int l,
                                        int n_sine, const AngleRule& angle,
                                        int n_quad) {
  if (n_quad <= 0) n_quad = 2 * n_sine + 40;
  const double R = state.spec.R;
  auto [x, w] = gauss_legendre(n_quad);
  std::vector<double> nodes(x.size()), weights(w.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes[i] = 0.5 * R * (x[i] + 1.0);
    weights[i] = 0.5 * R * w[i];
  }
  const PsiLattice lattice(state, nodes, angle);
  const Eigen::MatrixXd F = kernel_matrix(lattice, l);
  return sine_spectrum_of_kernel(F, nodes, weights, R, n_sine);
}

std::vector<double> lambdas_from_k(std::span<const double> k, int l) {
  std::vector<double> lam(k.size());
  const double scale = kFourPi / (2.0 * l + 1.0);
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double v = scale * k[i];
    lam[i] = v * v;
  }
  return lam;
}

SchmidtSpectrum schmidt_spectrum(const VariationalState& state,
                                 const SpectrumOptions& opts) {
  if (opts.l_m < 0) throw std::invalid_argument("schmidt_spectrum: l_m >= 0");
  const AngleRule angle = AngleRule::gauss(opts.angle_nodes);
  const PsiLattice lattice(state, uniform_grid(state.spec.R, opts.n_m), angle,
                           opts.parallel);

  SchmidtSpectrum spec;
  spec.n_m = opts.n_m;
  spec.l_m = opts.l_m;

  std::vector<std::vector<double>> lam_by_l(
      static_cast<std::size_t>(opts.l_m) + 1);
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
  for (int l = 0; l <= opts.l_m; ++l) {
    const RadialKernel kern = build_kernel(lattice, l);
    lam_by_l[static_cast<std::size_t>(l)] =
        lambdas_from_k(nystrom_spectrum(kern), l);
  }

  double total = 0.0;
  for (int l = 0; l <= opts.l_m; ++l) {
    const auto& lam = lam_by_l[static_cast<std::size_t>(l)];
    int n = 0;
    for (double v : lam) {
      total += (2.0 * l + 1.0) * v;
      if (v >= opts.keep_floor) spec.entries.push_back({n, l, v});
      ++n;
    }
  }
  std::stable_sort(spec.entries.begin(), spec.entries.end(),
                   [](const SchmidtEntry& a, const SchmidtEntry& b) {
                     if (a.l != b.l) return a.l < b.l;
                     return a.lambda > b.lambda;
                   });
  spec.probability_sum = total;
  return spec;
}

void dump_kernel(std::ostream& os, const RadialKernel& kernel,
                 std::span<const double> k_values) {
  const auto n = kernel.values.rows();
  os << "R " << kernel.R << "\n";
  os << "l " << kernel.l << "\n";
  os << "n_m " << n << "\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      os << kernel.values(i, j) << (j + 1 == n ? "" : " ");
    os << "\n";
  }
  os << "spectrum " << k_values.size() << "\n";
  for (std::size_t i = 0; i < k_values.size(); ++i)
    os << k_values[i] << (i + 1 == k_values.size() ? "" : " ");
  os << "\n";
}

}  // namespace confhe
