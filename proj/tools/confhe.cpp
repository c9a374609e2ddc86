#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "confhe/analysis.hpp"
#include "confhe/entropy.hpp"
#include "confhe/schmidt.hpp"
#include "confhe/solver.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
  int omega = 0;  // 0: escalate; otherwise fixed order (solve) / cap (scan)
  int n_m = 301;
  int l_max = 18;
  double energy_tol = 1e-5;
  double entropy_tol = 1e-5;
  std::vector<double> alpha_range{0.2, 4.0};
  std::string out;
  std::string format = "csv";
  int threads = 0;
  bool n_m_pinned = false;   // explicit --nm disables grid escalation
  bool l_max_pinned = false; // likewise for --lmax
};

void add_common(CLI::App* cmd, CommonOpts* o, bool with_format = true) {
  cmd->fallthrough();  // lets --config after the subcommand reach the app
  cmd->add_option("--omega", o->omega,
                  "Fixed expansion order (solve) or order cap (scan); 0 uses "
                  "automatic escalation");
  cmd->add_option("--nm", o->n_m, "Radial grid size for the Schmidt kernels");
  cmd->add_option("--lmax", o->l_max, "Angular momentum cutoff");
  cmd->add_option("--energy-tol", o->energy_tol,
                  "Convergence target on E0 (hartree)");
  cmd->add_option("--entropy-tol", o->entropy_tol,
                  "Convergence target on S_vN and L");
  cmd->add_option("--alpha-range", o->alpha_range,
                  "Nonlinear-parameter search range (lo hi)")
      ->expected(2);
  cmd->add_option("--out", o->out, "Output path (default stdout)");
  if (with_format)
    cmd->add_option("--format", o->format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", o->threads, "Worker thread count (0 = all)");
}

void note_pinned(const CLI::App* cmd, CommonOpts* o) {
  o->n_m_pinned = cmd->count("--nm") > 0;
  o->l_max_pinned = cmd->count("--lmax") > 0;
}

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

double parse_radius(const std::string& s) {
  if (s == "free") return confhe::kFreeAtomRadius;
  double R = 0.0;
  try {
    R = std::stod(s);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--radius", "expected a number or 'free'");
  }
  if (!(R > 0.0)) throw CLI::ValidationError("--radius", "must be > 0");
  if (R < confhe::kMinValidatedRadius)
    std::cerr << "warning: R = " << R << " lies below the validated range (R >= "
              << confhe::kMinValidatedRadius << ")\n";
  return R;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  return file;
}

confhe::ConvergeOptions make_converge_opts(const CommonOpts& o, bool fixed) {
  confhe::ConvergeOptions c;
  if (o.omega > 0) {
    c.omega_cap = o.omega;
    if (fixed) c.omega_start = o.omega;
  }
  c.n_m = o.n_m;
  c.l_m = o.l_max;
  if (o.n_m_pinned) c.n_m_cap = o.n_m;
  if (o.l_max_pinned) c.l_m_cap = o.l_max;
  c.alpha_range = {o.alpha_range[0], o.alpha_range[1]};
  return c;
}

json record_to_json(const confhe::ScanRecord& r) {
  return json{{"R", r.R},           {"omega", r.omega},
              {"alpha", r.alpha},   {"E0", r.E0},
              {"S_vN", r.S_vN},     {"L", r.L},
              {"prob_sum", r.prob_sum}, {"n_m", r.n_m},
              {"l_m", r.l_m},       {"seconds", r.seconds},
              {"converged", r.converged}};
}

void emit_records(std::ostream& os, const std::string& format,
                  std::span<const confhe::ScanRecord> records) {
  if (format == "json") {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(record_to_json(r));
    os << arr.dump(1) << "\n";
  } else {
    confhe::write_csv(os, records);
  }
}

int run_solve(const CommonOpts& o, const std::string& radius_str) {
  apply_threads(o.threads);
  const double R = parse_radius(radius_str);
  confhe::ConvergenceTargets targets{o.energy_tol, o.entropy_tol};
  const auto opts = make_converge_opts(o, /*fixed=*/true);
  const confhe::ScanRecord rec = confhe::converge_point(R, targets, opts);
  if (!rec.converged)
    std::cerr << "warning: point not converged at caps (omega " << rec.omega
              << ", n_m " << rec.n_m << ", l_m " << rec.l_m << ")\n";
  std::ofstream file;
  std::ostream& os = open_out(o.out, file);
  if (o.format == "json")
    os << record_to_json(rec).dump(1) << "\n";
  else
    confhe::write_csv(os, {&rec, 1});
  return 0;
}

int run_scan(const CommonOpts& o, const std::string& radii_str,
             bool default_grid) {
  apply_threads(o.threads);
  std::vector<double> radii;
  if (default_grid) {
    radii = confhe::default_radius_grid();
  } else {
    std::stringstream ss(radii_str);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) radii.push_back(parse_radius(tok));
  }
  if (radii.empty())
    throw CLI::ValidationError("--radii", "need at least one radius");

  confhe::ConvergenceTargets targets{o.energy_tol, o.entropy_tol};
  const auto opts = make_converge_opts(o, /*fixed=*/false);
  const auto records = confhe::scan(radii, targets, opts);
  for (const auto& r : records)
    if (!r.converged)
      std::cerr << "warning: R = " << r.R << " not converged at caps\n";
  std::ofstream file;
  emit_records(open_out(o.out, file), o.format, records);
  return 0;
}

int run_analyze(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open scan CSV: " + in_path);
  const auto records = confhe::read_csv(in);
  const confhe::CurveAnalysis a = confhe::analyze_curve(records);

  json j;
  if (a.inflection_R_SvN) j["inflection_R_SvN"] = *a.inflection_R_SvN;
  if (a.inflection_R_L) j["inflection_R_L"] = *a.inflection_R_L;
  if (a.critical_R) j["critical_R"] = *a.critical_R;
  j["rescale_factor"] = a.rescale_factor;
  j["records"] = records.size();

  std::ofstream file;
  open_out(out_path, file) << j.dump(1) << "\n";
  return 0;
}

int run_kernel_dump(const CommonOpts& o, const std::string& radius_str, int l,
                    double alpha) {
  apply_threads(o.threads);
  const double R = parse_radius(radius_str);
  const int omega = o.omega > 0 ? o.omega : 5;
  const auto spec = confhe::HamiltonianSpec::confined(R);
  const confhe::VariationalState state =
      alpha > 0.0
          ? confhe::solve_fixed_alpha(omega, alpha, spec)
          : confhe::optimize_alpha(omega, spec,
                                   {o.alpha_range[0], o.alpha_range[1]});
  const auto angle = confhe::AngleRule::gauss(64);
  const auto kernel = confhe::build_kernel(state, l, o.n_m, angle);
  const auto k = confhe::nystrom_spectrum(kernel);
  std::ofstream file;
  confhe::dump_kernel(open_out(o.out, file), kernel, k);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Ground state and entanglement entropies of a helium atom confined in "
      "an impenetrable spherical cavity"};
  app.require_subcommand(1);
  // key=value config, keys grouped in a [subcommand] section; explicit
  // flags override file values
  app.set_config("--config", "", "Plain-text key=value config file");

  CommonOpts solve_opts, scan_opts, dump_opts;
  std::string solve_radius, scan_radii, dump_radius = "2.5";
  bool default_grid = false;
  std::string analyze_in, analyze_out;
  int dump_l = 0;
  double dump_alpha = 0.0;

  auto* solve = app.add_subcommand(
      "solve", "Converge one cavity radius and print E0, alpha and entropies");
  solve->add_option("--radius", solve_radius, "Cavity radius in bohr, or 'free'")
      ->required();
  add_common(solve, &solve_opts);

  auto* scan = app.add_subcommand("scan", "Sweep a list of radii to CSV/JSON");
  scan->add_option("--radii", scan_radii, "Comma-separated ascending radii");
  scan->add_flag("--default-grid", default_grid,
                 "Use the built-in radius grid");
  add_common(scan, &scan_opts);

  auto* analyze = app.add_subcommand(
      "analyze", "Inflection points, ionization radius and entropy rescaling "
                 "factor from a scan CSV");
  analyze->add_option("--in", analyze_in, "Scan CSV path")->required();
  analyze->add_option("--out", analyze_out, "Output path (default stdout)");

  auto* dump = app.add_subcommand("kernel-dump",
                                  "Dump one radial kernel and its spectrum");
  dump->add_option("--radius", dump_radius, "Cavity radius in bohr, or 'free'");
  dump->add_option("--l", dump_l, "Angular momentum of the kernel")->required();
  dump->add_option("--alpha", dump_alpha,
                   "Fixed nonlinear parameter (0 = optimize)");
  add_common(dump, &dump_opts, /*with_format=*/false);

  CLI11_PARSE(app, argc, argv);
  note_pinned(solve, &solve_opts);
  note_pinned(scan, &scan_opts);
  note_pinned(dump, &dump_opts);

  try {
    if (solve->parsed()) return run_solve(solve_opts, solve_radius);
    if (scan->parsed())
      return run_scan(scan_opts, scan_radii, default_grid);
    if (analyze->parsed()) return run_analyze(analyze_in, analyze_out);
    if (dump->parsed())
      return run_kernel_dump(dump_opts, dump_radius, dump_l, dump_alpha);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
