#include "confhe/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "confhe/spline.hpp"

namespace confhe {

namespace {

struct EntropyPoint {
  double S_vN, L, prob_sum;
};

EntropyPoint entropy_at(const VariationalState& state, int n_m, int l_m,
                        const ConvergeOptions& opts) {
  SpectrumOptions so;
  so.n_m = n_m;
  so.l_m = l_m;
  so.angle_nodes = opts.angle_nodes;
  so.parallel = opts.parallel;
  const EntropyResult e =
      entropies(schmidt_spectrum(state, so), opts.deficit_tol);
  return {e.S_vN, e.L, e.probability_sum};
}

}  // namespace

ConvergedPoint converge_point_full(double R, const ConvergenceTargets& targets,
                                   const ConvergeOptions& opts) {
  if (!(R > 0.0)) throw std::invalid_argument("converge_point: R must be > 0");
  const auto t_start = std::chrono::steady_clock::now();

  const HamiltonianSpec spec = HamiltonianSpec::confined(R);
  SolveOptions solve_opts;
  solve_opts.parallel = opts.parallel;

  AlphaRange range = opts.alpha_range;
  VariationalState state;
  EntropyPoint ent{};
  bool omega_converged = false;
  double prev_E = 0.0, prev_S = 0.0, prev_L = 0.0;
  bool have_prev = false;

  int n_m = opts.n_m;
  int l_m = opts.l_m;

  // The configured range covers the optima seen for R >= 1, but in deep
  // confinement E(alpha) flattens and its minimum can drift past any fixed
  // window, so a boundary hit widens the search instead of failing the point.
  auto optimize_widening = [&](int omega, AlphaRange attempt) {
    for (int tries = 0;; ++tries) {
      try {
        return optimize_alpha(omega, spec, attempt, solve_opts);
      } catch (const AlphaBoundaryError&) {
        if (tries == 0 && (attempt.lo != opts.alpha_range.lo ||
                           attempt.hi != opts.alpha_range.hi)) {
          attempt = opts.alpha_range;  // narrowed window missed the minimum
        } else if (tries < 6) {
          attempt.lo = std::max(0.05, 0.5 * attempt.lo);
          attempt.hi *= 2.0;
        } else {
          throw;
        }
      }
    }
  };

  for (int omega = opts.omega_start; omega <= opts.omega_cap; ++omega) {
    state = optimize_widening(omega, range);
    ent = entropy_at(state, n_m, l_m, opts);

    if (have_prev && std::abs(state.energy - prev_E) <= targets.energy_tol &&
        std::abs(ent.S_vN - prev_S) <= targets.entropy_tol &&
        std::abs(ent.L - prev_L) <= targets.entropy_tol) {
      omega_converged = true;
      break;
    }
    prev_E = state.energy;
    prev_S = ent.S_vN;
    prev_L = ent.L;
    have_prev = true;
    // the optimum drifts slowly with omega; rescan a window around it
    range.lo = std::max(0.05, state.alpha - 0.5);
    range.hi = state.alpha + 0.5;
  }

  // confirm the radial grid and the l truncation, escalating if they move
  bool cutoffs_converged = true;
  while (2 * n_m - 1 <= opts.n_m_cap) {
    const EntropyPoint fine = entropy_at(state, 2 * n_m - 1, l_m, opts);
    if (std::abs(fine.S_vN - ent.S_vN) <= targets.entropy_tol &&
        std::abs(fine.L - ent.L) <= targets.entropy_tol)
      break;
    n_m = 2 * n_m - 1;
    ent = fine;
    cutoffs_converged = 2 * n_m - 1 <= opts.n_m_cap;
  }
  while (l_m + 6 <= opts.l_m_cap) {
    const EntropyPoint fine = entropy_at(state, n_m, l_m + 6, opts);
    if (std::abs(fine.S_vN - ent.S_vN) <= targets.entropy_tol &&
        std::abs(fine.L - ent.L) <= targets.entropy_tol)
      break;
    l_m += 6;
    ent = fine;
    cutoffs_converged = l_m + 6 <= opts.l_m_cap;
  }

  ConvergedPoint out;
  out.state = state;
  out.record.R = R;
  out.record.omega = state.omega;
  out.record.alpha = state.alpha;
  out.record.E0 = state.energy;
  out.record.S_vN = ent.S_vN;
  out.record.L = ent.L;
  out.record.prob_sum = ent.prob_sum;
  out.record.n_m = n_m;
  out.record.l_m = l_m;
  out.record.converged = omega_converged && cutoffs_converged;
  out.record.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return out;
}

ScanRecord converge_point(double R, const ConvergenceTargets& targets,
                          const ConvergeOptions& opts) {
  return converge_point_full(R, targets, opts).record;
}

std::vector<ScanRecord> scan(std::span<const double> radii,
                             const ConvergenceTargets& targets,
                             const ConvergeOptions& opts) {
  if (radii.empty()) throw std::invalid_argument("scan: empty radius list");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0))
      throw std::invalid_argument("scan: radii must be > 0");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw std::invalid_argument("scan: radii must be ascending");
  }
  // Points run sequentially; the assembly and lattice kernels inside each
  // point carry the parallelism. A few expensive points dominate the
  // sweep, so point-level distribution would only idle workers.
  std::vector<ScanRecord> records;
  records.reserve(radii.size());
  for (double R : radii)
    records.push_back(converge_point(R, targets, opts));
  return records;
}

std::vector<double> default_radius_grid() {
  return {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0, 1.25,
          1.5,   2.0,  2.5,   3.0, 4.0,   5.0,  7.5,   10.0, 15.0};
}

CurveAnalysis analyze_curve(std::span<const ScanRecord> records) {
  if (records.size() < 8)
    throw std::invalid_argument("analyze_curve: need >= 8 records");
  std::vector<double> R, S, L, E;
  for (const auto& rec : records) {
    R.push_back(rec.R);
    S.push_back(rec.S_vN);
    L.push_back(rec.L);
    E.push_back(rec.E0);
  }
  for (std::size_t i = 1; i < R.size(); ++i)
    if (!(R[i] > R[i - 1]))
      throw std::invalid_argument("analyze_curve: records must ascend in R");
  if (R.front() > 0.5 || R.back() < 5.0)
    throw std::invalid_argument("analyze_curve: records must span [0.5, 5]");
  for (std::size_t i = 1; i < R.size(); ++i)
    if (R[i - 1] >= 0.5 && R[i] <= 1.5 && R[i] - R[i - 1] > 0.25 + 1e-12)
      throw std::invalid_argument(
          "analyze_curve: knot spacing above 0.25 inside [0.5, 1.5]");

  const CubicSpline spl_S(R, S), spl_L(R, L), spl_E(R, E);
  CurveAnalysis out;
  out.inflection_R_SvN = spl_S.first_inflection();
  out.inflection_R_L = spl_L.first_inflection();
  out.critical_R = spl_E.first_root();

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    num += S[i] * L[i];
    den += L[i] * L[i];
  }
  out.rescale_factor = den > 0.0 ? num / den : 0.0;
  return out;
}

std::string format_double(double v, int significant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, v);
  return buf;
}

void write_csv(std::ostream& os, std::span<const ScanRecord> records) {
  os << "R,omega,alpha,E0,S_vN,L,prob_sum,n_m,l_m,seconds\n";
  for (const auto& r : records) {
    os << format_double(r.R) << ',' << r.omega << ',' << format_double(r.alpha)
       << ',' << format_double(r.E0) << ',' << format_double(r.S_vN) << ','
       << format_double(r.L) << ',' << format_double(r.prob_sum) << ','
       << r.n_m << ',' << r.l_m << ',' << format_double(r.seconds) << '\n';
  }
}

std::vector<ScanRecord> read_csv(std::istream& is) {
  std::vector<ScanRecord> records;
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("read_csv: empty input");
  if (line.rfind("R,omega,alpha", 0) != 0)
    throw std::runtime_error("read_csv: unexpected header: " + line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 10)
      throw std::runtime_error("read_csv: malformed row: " + line);
    ScanRecord r;
    r.R = std::stod(fields[0]);
    r.omega = std::stoi(fields[1]);
    r.alpha = std::stod(fields[2]);
    r.E0 = std::stod(fields[3]);
    r.S_vN = std::stod(fields[4]);
    r.L = std::stod(fields[5]);
    r.prob_sum = std::stod(fields[6]);
    r.n_m = std::stoi(fields[7]);
    r.l_m = std::stoi(fields[8]);
    r.seconds = std::stod(fields[9]);
    records.push_back(r);
  }
  return records;
}

}  // namespace confhe
