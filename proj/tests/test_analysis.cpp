#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <sstream>

#include "confhe/analysis.hpp"
#include "confhe/spline.hpp"

using namespace confhe;

TEST_CASE("spline reproduces knots and linear data") {
  const std::vector<double> x{0.0, 0.5, 1.2, 2.0, 3.5};
  const std::vector<double> lin{1.0, 2.0, 3.4, 5.0, 8.0};  // y = 2x + 1
  const CubicSpline s(x, lin);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(s(x[i]) == doctest::Approx(lin[i]).epsilon(1e-14));
  CHECK(s(1.7) == doctest::Approx(2.0 * 1.7 + 1.0).epsilon(1e-13));
  CHECK(std::abs(s.second_derivative(1.7)) <= 1e-12);
  CHECK_FALSE(s.first_inflection());

  CHECK_THROWS_AS(CubicSpline(std::vector<double>{0.0, 1.0},
                              std::vector<double>{1.0, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CubicSpline(std::vector<double>{0.0, 1.0, 0.5},
                              std::vector<double>{1.0, 2.0, 3.0}),
                  std::invalid_argument);
}

TEST_CASE("spline root and inflection finding") {
  // y = x^2 - 2 on a dense grid: root at sqrt(2)
  std::vector<double> x, y;
  for (double v = 0.0; v <= 2.0001; v += 0.05) {
    x.push_back(v);
    y.push_back(v * v - 2.0);
  }
  const CubicSpline s(x, y);
  auto root = s.first_root();
  REQUIRE(root.has_value());
  CHECK(*root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  // strictly convex data has no interior inflection
  CHECK_FALSE(s.first_inflection());

  // tanh((x-2)/0.5): inflection at exactly 2
  std::vector<double> xt, yt;
  for (double v = 0.0; v <= 4.0001; v += 0.1) {
    xt.push_back(v);
    yt.push_back(std::tanh((v - 2.0) / 0.5));
  }
  const CubicSpline st(xt, yt);
  auto infl = st.first_inflection();
  REQUIRE(infl.has_value());
  CHECK(std::abs(*infl - 2.0) <= 0.02);
}

TEST_CASE("csv round trip with 9 significant digits") {
  CHECK(format_double(0.123456789123) == "0.123456789");
  CHECK(format_double(-2.9034110523) == "-2.90341105");

  std::vector<ScanRecord> records(2);
  records[0] = {0.5, 5, 2.0615, 22.7413028, 0.0108813, 0.00154902,
                0.99999999, 301, 18, 12.5, true};
  records[1] = {5.0, 6, 1.6872, -2.90340926, 0.0846133, 0.01584494,
                0.99999988, 301, 18, 250.0, true};
  std::ostringstream os;
  write_csv(os, records);
  const std::string text = os.str();
  CHECK(text.rfind("R,omega,alpha,E0,S_vN,L,prob_sum,n_m,l_m,seconds\n", 0) ==
        0);

  std::istringstream is(text);
  const auto back = read_csv(is);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].R == doctest::Approx(records[i].R).epsilon(1e-9));
    CHECK(back[i].omega == records[i].omega);
    CHECK(back[i].E0 == doctest::Approx(records[i].E0).epsilon(1e-9));
    CHECK(back[i].S_vN == doctest::Approx(records[i].S_vN).epsilon(1e-9));
    CHECK(back[i].n_m == records[i].n_m);
    CHECK(back[i].l_m == records[i].l_m);
  }

  std::istringstream junk("not,a,header\n");
  CHECK_THROWS_AS(read_csv(junk), std::runtime_error);
}

TEST_CASE("curve analysis on synthetic records") {
  // S has its inflection at 0.95, L is proportional with factor 1/5.48,
  // and E crosses zero at 1.101
  std::vector<ScanRecord> records;
  for (double R : default_radius_grid()) {
    ScanRecord r;
    r.R = R;
    r.S_vN = 0.042 * (1.0 + std::tanh((R - 0.95) / 0.45));
    r.L = r.S_vN / 5.48;
    r.E0 = std::pow(1.101 / R, 2.0) - 1.0;
    records.push_back(r);
  }
  const auto a = analyze_curve(records);
  REQUIRE(a.inflection_R_SvN.has_value());
  REQUIRE(a.inflection_R_L.has_value());
  REQUIRE(a.critical_R.has_value());
  CHECK(std::abs(*a.inflection_R_SvN - 0.95) <= 0.03);
  CHECK(std::abs(*a.inflection_R_L - 0.95) <= 0.03);
  // natural-spline interpolation on the 0.25-spaced grid shifts
  // the root by ~2e-3; the acceptance tolerance there is 0.01
  CHECK(std::abs(*a.critical_R - 1.101) <= 0.005);
  CHECK(a.rescale_factor == doctest::Approx(5.48).epsilon(1e-9));
}

TEST_CASE("curve analysis input validation") {
  std::vector<ScanRecord> few(4);
  for (int i = 0; i < 4; ++i) few[i].R = 1.0 + i;
  CHECK_THROWS_AS(analyze_curve(few), std::invalid_argument);

  // eight records but headed the wrong way
  std::vector<ScanRecord> reversed(8);
  for (int i = 0; i < 8; ++i) reversed[i].R = 8.0 - i;
  CHECK_THROWS_AS(analyze_curve(reversed), std::invalid_argument);

  // coarse spacing through the inflection region
  std::vector<ScanRecord> coarse(8);
  const double rs[8] = {0.25, 0.75, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0};
  for (int i = 0; i < 8; ++i) coarse[i].R = rs[i];
  CHECK_THROWS_AS(analyze_curve(coarse), std::invalid_argument);
}

TEST_CASE("scan input validation") {
  CHECK_THROWS_AS(scan({}), std::invalid_argument);
  const std::vector<double> unsorted{1.0, 0.5};
  CHECK_THROWS_AS(scan(unsorted), std::invalid_argument);
  const std::vector<double> negative{-1.0, 0.5};
  CHECK_THROWS_AS(scan(negative), std::invalid_argument);
}

TEST_CASE("singleton scan composes converge_point and is deterministic") {
  ConvergenceTargets loose{1e-3, 1e-3};
  ConvergeOptions cheap;
  cheap.omega_start = 2;
  cheap.omega_cap = 3;
  cheap.n_m = 101;
  cheap.l_m = 4;
  cheap.l_m_cap = 4;
  cheap.n_m_cap = 201;
  cheap.angle_nodes = 24;

  const auto one = converge_point(1.0, loose, cheap);
  const std::vector<double> radii{1.0};
  const auto via_scan = scan(radii, loose, cheap);
  REQUIRE(via_scan.size() == 1);
  CHECK(via_scan[0].E0 == one.E0);
  CHECK(via_scan[0].S_vN == one.S_vN);
  CHECK(via_scan[0].L == one.L);
  CHECK(via_scan[0].alpha == one.alpha);
  CHECK(via_scan[0].omega == one.omega);

  const auto again = converge_point(1.0, loose, cheap);
  CHECK(again.E0 == one.E0);        // bit-identical rerun
  CHECK(again.S_vN == one.S_vN);
  CHECK(again.L == one.L);
}
