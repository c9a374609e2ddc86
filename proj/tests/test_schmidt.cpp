#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "confhe/entropy.hpp"
#include "confhe/schmidt.hpp"
#include "confhe/solver.hpp"

using namespace confhe;

namespace {

// single-term state: psi = c (R-r1)(R-r2) e^{-alpha(r1+r2)}, an exact
// angle-independent product
VariationalState product_state(double R, double alpha) {
  return solve_fixed_alpha(0, alpha, HamiltonianSpec::confined(R));
}

VariationalState helium_state(double R, int omega) {
  return optimize_alpha(omega, HamiltonianSpec::confined(R));
}

std::vector<double> uniform(double R, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = R * i / (n - 1.0);
  return g;
}

}  // namespace

TEST_CASE("psi vanishes at the wall and under exchange") {
  const auto state = helium_state(2.0, 2);
  CHECK(evaluate_psi(state, state.spec.R, 0.7, 0.2) == 0.0);
  CHECK(evaluate_psi(state, 0.7, state.spec.R, -0.4) == 0.0);
  for (double t : {-0.9, 0.0, 0.7})
    CHECK(evaluate_psi(state, 0.4, 1.1, t) ==
          doctest::Approx(evaluate_psi(state, 1.1, 0.4, t)).epsilon(1e-13));
}

TEST_CASE("finalized state is unit normalized under the volume measure") {
  const auto state = helium_state(2.5, 3);
  const int n = default_radial_order(3);
  const auto rule = build_rule_3d(state.spec.R, {n, n, n});
  double norm = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double r1 = rule.r1[q], r2 = rule.r2[q], u = rule.u[q];
    const double t = (r1 * r1 + r2 * r2 - u * u) / (2.0 * r1 * r2);
    const double psi = evaluate_psi(state, r1, r2, t);
    norm += rule.w[q] * psi * psi;
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lattice builder matches the pointwise reference") {
  const auto state = helium_state(2.0, 3);
  const auto grid = uniform(state.spec.R, 21);
  const AngleRule angle = AngleRule::gauss(12);
  const PsiLattice lat(state, grid, angle);
  const auto ref = psi_lattice_reference(state, grid, angle);
  std::size_t pos = 0;
  double worst = 0.0;
  for (int j = 0; j < 21; ++j)
    for (int i = 0; i <= j; ++i)
      for (int k = 0; k < angle.size(); ++k)
        worst = std::max(worst, std::abs(lat(i, j, k) - ref[pos++]));
  CHECK(worst <= 1e-13);
  // symmetric accessor
  CHECK(lat(3, 7, 2) == lat(7, 3, 2));
}

TEST_CASE("kernels of an exact product state") {
  const double R = 2.0, alpha = 1.0;
  const auto state = product_state(R, alpha);
  const AngleRule angle = AngleRule::gauss(32);
  const int n_m = 41;
  const PsiLattice lat(state, uniform(R, n_m), angle);

  const auto f0 = build_kernel(lat, 0);
  const double c = state.coeffs[0];
  for (int i = 0; i < n_m; ++i) {
    CHECK(f0.values(0, i) == 0.0);          // r factor
    CHECK(f0.values(n_m - 1, i) == 0.0);    // wall
    for (int j = 0; j <= i; ++j) {
      const double ri = f0.grid[i], rj = f0.grid[j];
      const double expect = ri * rj * c * (R - ri) * (R - rj) *
                            std::exp(-alpha * (ri + rj));
      CHECK(f0.values(i, j) == doctest::Approx(expect).epsilon(1e-12));
      CHECK(f0.values(i, j) == f0.values(j, i));
    }
  }
  // Legendre orthogonality: an angle-independent psi has no l >= 1 content
  for (int l : {1, 2, 3}) {
    const auto fl = build_kernel(lat, l);
    CHECK(fl.values.cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("nystrom eigenvalues of synthetic kernels") {
  const double R = 5.0;

  SUBCASE("zero kernel") {
    RadialKernel k;
    k.l = 0;
    k.R = R;
    k.grid = uniform(R, 51);
    k.values = Eigen::MatrixXd::Zero(51, 51);
    for (double v : nystrom_spectrum(k)) CHECK(v == 0.0);
  }

  SUBCASE("rank-1 separable kernel r r'") {
    const int n_m = 2001;
    RadialKernel k;
    k.l = 0;
    k.R = R;
    k.grid = uniform(R, n_m);
    k.values.resize(n_m, n_m);
    for (int i = 0; i < n_m; ++i)
      for (int j = 0; j < n_m; ++j)
        k.values(i, j) = k.grid[i] * k.grid[j];
    const auto spec = nystrom_spectrum(k);
    const double exact = R * R * R / 3.0;  // int_0^R r^2 dr
    CHECK(std::abs(spec[0] - exact) / exact <= 1e-6);
    CHECK(std::abs(spec[1]) <= 1e-12 * exact);
  }
}

TEST_CASE("nystrom spectrum stability under grid refinement") {
  const auto state = helium_state(2.5, 3);
  const AngleRule angle = AngleRule::gauss(64);
  const auto k301 = nystrom_spectrum(build_kernel(state, 0, 301, angle));
  const auto k601 = nystrom_spectrum(build_kernel(state, 0, 601, angle));
  // double-zero boundary rows make the trapezoid eigenvalues h^4-accurate
  CHECK(std::abs(k301[0] - k601[0]) <= 1e-7);
  CHECK(std::abs(k301[1] - k601[1]) <= 1e-7);
}

TEST_CASE("nystrom eigenvectors satisfy the wall condition") {
  const auto state = helium_state(2.0, 2);
  const AngleRule angle = AngleRule::gauss(32);
  const auto kern = build_kernel(state, 0, 101, angle);
  Eigen::MatrixXd vecs;
  nystrom_spectrum(kern, &vecs);
  CHECK(std::abs(vecs(0, 0)) <= 1e-14);
  CHECK(std::abs(vecs(100, 0)) <= 1e-14);
}

TEST_CASE("sine projection of synthetic kernels") {
  const double R = 3.0;
  const int nq = 900;
  auto [x, w] = gauss_legendre(nq);
  std::vector<double> nodes(nq), weights(nq);
  for (int i = 0; i < nq; ++i) {
    nodes[i] = 0.5 * R * (x[i] + 1.0);
    weights[i] = 0.5 * R * w[i];
  }

  SUBCASE("rank-1 r r'") {
    Eigen::MatrixXd F(nq, nq);
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nq; ++j) F(i, j) = nodes[i] * nodes[j];
    const double exact = R * R * R / 3.0;
    // r does not vanish at the wall, so the sine expansion converges like
    // 1/n_sine; assert the trend and the asymptote
    double prev = 1e300;
    for (int n_sine : {25, 100, 400}) {
      const auto k = sine_spectrum_of_kernel(F, nodes, weights, R, n_sine);
      const double err = std::abs(k[0] - exact) / exact;
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev <= 2e-3);
  }

  SUBCASE("rank-1 kernel respecting the wall condition") {
    // v = r (R - r): int v^2 = R^5 / 30
    Eigen::MatrixXd F(nq, nq);
    auto v = [R](double r) { return r * (R - r); };
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nq; ++j) F(i, j) = v(nodes[i]) * v(nodes[j]);
    const double exact = std::pow(R, 5) / 30.0;
    const auto k = sine_spectrum_of_kernel(F, nodes, weights, R, 60);
    CHECK(std::abs(k[0] - exact) / exact <= 1e-8);
  }

  SUBCASE("zero kernel") {
    const Eigen::MatrixXd F = Eigen::MatrixXd::Zero(nq, nq);
    for (double v : sine_spectrum_of_kernel(F, nodes, weights, R, 20))
      CHECK(v == 0.0);
  }
}

TEST_CASE("sine and nystrom routes agree on a helium state") {
  const auto state = helium_state(2.5, 3);
  const AngleRule angle = AngleRule::gauss(64);
  for (int l : {0, 1}) {
    const auto k_nys = nystrom_spectrum(build_kernel(state, l, 601, angle));
    const auto k_sin = sine_basis_spectrum(state, l, 120, angle);
    for (int n = 0; n < 3; ++n)
      CHECK(std::abs(k_nys[n] - k_sin[n]) <= 1e-6);
  }
}

TEST_CASE("lambda from k") {
  CHECK(lambdas_from_k(std::vector{0.0}, 0)[0] == 0.0);
  const double k0 = 1.0 / (4.0 * std::numbers::pi);
  CHECK(lambdas_from_k(std::vector{k0}, 0)[0] ==
        doctest::Approx(1.0).epsilon(1e-14));
  // sign squared away; (2l+1) factor undone
  const double k2 = -5.0 / (4.0 * std::numbers::pi);
  CHECK(lambdas_from_k(std::vector{k2}, 2)[0] ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("spectrum of a separable state collapses to one term") {
  const auto state = product_state(2.0, 1.0);
  SpectrumOptions opts;
  opts.n_m = 201;
  opts.l_m = 4;
  const auto spec = schmidt_spectrum(state, opts);
  REQUIRE(!spec.entries.empty());
  CHECK(spec.entries[0].lambda == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(spec.probability_sum - 1.0) <= 1e-7);
  double residual = 0.0;
  for (const auto& e : spec.entries)
    if (!(e.n == 0 && e.l == 0)) residual += (2.0 * e.l + 1.0) * e.lambda;
  CHECK(residual <= 1e-8);
}

TEST_CASE("noninteracting free electrons stay numerically separable") {
  HamiltonianSpec box = HamiltonianSpec::confined(1.5);
  box.Z = 0.0;
  box.interaction_on = false;
  const auto state = solve_fixed_alpha(7, 0.5 / box.R, box);
  SpectrumOptions opts;
  opts.n_m = 201;
  opts.l_m = 4;
  const auto spec = schmidt_spectrum(state, opts);
  CHECK(spec.entries[0].lambda == doctest::Approx(1.0).epsilon(1e-6));
  double residual = 0.0;
  for (const auto& e : spec.entries)
    if (!(e.n == 0 && e.l == 0)) residual += (2.0 * e.l + 1.0) * e.lambda;
  CHECK(residual <= 1e-6);
}

TEST_CASE("occupancies decay rapidly with l") {
  const auto state = helium_state(2.5, 3);
  SpectrumOptions opts;
  opts.n_m = 201;
  opts.l_m = 4;
  const auto spec = schmidt_spectrum(state, opts);
  std::vector<double> top(5, 0.0);
  for (const auto& e : spec.entries)
    top[static_cast<std::size_t>(e.l)] =
        std::max(top[static_cast<std::size_t>(e.l)], e.lambda);
  for (int l = 1; l <= 4; ++l) {
    CHECK(top[l] < top[l - 1]);
    CHECK(top[l] < 0.25 * top[l - 1]);
  }
  CHECK(top[4] < 1e-5 * top[0]);
}

TEST_CASE("full spectrum bookkeeping") {
  const auto state = helium_state(2.5, 3);
  SpectrumOptions opts;
  opts.n_m = 201;
  opts.l_m = 8;
  const auto spec = schmidt_spectrum(state, opts);
  CHECK(spec.n_m == 201);
  CHECK(spec.l_m == 8);
  CHECK(std::abs(spec.deficit()) <= 1e-4);
  int last_l = 0;
  double last_lambda = 2.0;
  for (const auto& e : spec.entries) {
    CHECK(e.lambda >= 0.0);
    CHECK(e.lambda <= 1.0);
    if (e.l == last_l) CHECK(e.lambda <= last_lambda);
    last_l = e.l;
    last_lambda = e.lambda;
  }
  CHECK(spec.probability_sum <= 1.0 + 1e-9);
}

TEST_CASE("kernel dump format") {
  const auto state = product_state(1.5, 0.8);
  const AngleRule angle = AngleRule::gauss(16);
  const auto kern = build_kernel(state, 0, 5, angle);
  const auto k = nystrom_spectrum(kern);
  std::ostringstream os;
  dump_kernel(os, kern, k);
  std::istringstream is(os.str());
  std::string tag;
  double R;
  int l, n_m;
  is >> tag >> R;
  CHECK(tag == "R");
  CHECK(R == doctest::Approx(1.5));
  is >> tag >> l;
  CHECK(tag == "l");
  CHECK(l == 0);
  is >> tag >> n_m;
  CHECK(tag == "n_m");
  CHECK(n_m == 5);
  for (int i = 0; i < n_m * n_m; ++i) {
    double v;
    REQUIRE(static_cast<bool>(is >> v));
  }
  std::size_t count;
  is >> tag >> count;
  CHECK(tag == "spectrum");
  CHECK(count == k.size());
}
