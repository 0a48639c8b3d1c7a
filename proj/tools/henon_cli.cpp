#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "henon/io.hpp"
#include "henon/spectrum.hpp"
#include "henon/sweep.hpp"
#include "henon/topology.hpp"

namespace fs = std::filesystem;
using namespace henon;

// exit codes: 0 ok, 2 usage error, 3 solver failure, 4 consistency finding
namespace {
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitFinding = 4;

Grading parse_grading(const std::string& s) {
  if (s == "uniform") return Grading::Uniform;
  if (s == "boundary") return Grading::Boundary;
  throw ConfigError("unknown grading '" + s + "' (uniform|boundary)");
}

void print_constants_table(const json& rec) {
  std::cout << "tbar  = " << format_g10(rec["tbar"].get<double>())
            << "  (residual " << format_g10(rec["tbar_residual"].get<double>()) << ")\n";
  std::cout << "kappa = " << format_g10(rec["kappa"].get<double>()) << "\n";
  std::cout << "gamma = " << format_g10(rec["gamma"].get<double>())
            << "  (quoted 4.859, discrepancy "
            << format_g10(rec["gamma_discrepancy"].get<double>()) << ")\n\n";
  std::cout << "alpha  multiplicity  case1_max_n  case2_max_n  N_alpha  quasiradial\n";
  for (const auto& row : rec["thresholds"]) {
    std::cout << format_g10(row["alpha"].get<double>()) << "      " << row["multiplicity"] << "   "
              << "          " << row["case1_max_n"] << "            " << row["case2_max_n"]
              << "            " << row["max_regions"] << "        "
              << row["guaranteed_quasiradial"] << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"henon: least-energy nodal n-invariant solutions of the Henon problem on the disc"};
  app.require_subcommand(1);

  // ---- constants ----
  auto* c_cmd = app.add_subcommand("constants", "asymptotic constants and threshold table");
  std::string c_alphas = "0,1,2";
  bool c_json = false;
  c_cmd->add_option("--alpha", c_alphas, "comma-separated alpha list (default 0,1,2)");
  c_cmd->add_flag("--json", c_json, "emit JSON");
  c_cmd->set_config("--config");

  // ---- radial ----
  auto* r_cmd = app.add_subcommand("radial", "radial two-zone baseline by shooting");
  double r_alpha = 0.0, r_p = 10.0;
  std::string r_plist, r_out = ".";
  bool r_json = false;
  r_cmd->add_option("--alpha", r_alpha, "weight exponent alpha >= 0");
  r_cmd->add_option("--p", r_p, "nonlinearity exponent p > 1");
  r_cmd->add_option("--plist", r_plist, "p list start:stop:step (energy table mode)");
  r_cmd->add_option("--out", r_out, "output directory for the profile CSV");
  r_cmd->add_flag("--json", r_json, "emit JSON");
  r_cmd->set_config("--config");

  // ---- solve ----
  auto* s_cmd = app.add_subcommand("solve", "minimize on the nodal Nehari set in H^1_{0,n}");
  double s_alpha = 0.0, s_p = 30.0;
  int s_n = 2, s_nr = 96, s_ntheta = 48, s_restarts = 3;
  std::string s_init = "auto", s_out = ".", s_grading = "uniform";
  unsigned long s_seed = 1;
  double s_rtol = 1e-9;
  bool s_json = false;
  s_cmd->add_option("--alpha", s_alpha, "alpha >= 0");
  s_cmd->add_option("--p", s_p, "p > 1");
  s_cmd->add_option("--n", s_n, "symmetry order n >= 1");
  s_cmd->add_option("--nr", s_nr, "radial resolution");
  s_cmd->add_option("--ntheta", s_ntheta, "angular cells per sector");
  s_cmd->add_option("--init", s_init, "radial-perturbed|two-bump|annular-split|auto");
  s_cmd->add_option("--seed", s_seed, "random seed");
  s_cmd->add_option("--restarts", s_restarts, "number of restarts");
  s_cmd->add_option("--rtol", s_rtol, "residual tolerance");
  s_cmd->add_option("--grading", s_grading, "uniform|boundary");
  s_cmd->add_option("--out", s_out, "output directory");
  s_cmd->add_flag("--json", s_json, "emit JSON");
  s_cmd->set_config("--config");

  // ---- sweep ----
  auto* w_cmd = app.add_subcommand("sweep", "(alpha, p, n) sweep: solve + classify + morse");
  std::string w_alphas = "0", w_plist = "50", w_nrange = "1..5", w_out = "sweep_out";
  std::string w_init = "auto", w_grading = "uniform";
  int w_nr = 96, w_ntheta = 48, w_restarts = 3;
  unsigned long w_seed = 1;
  w_cmd->add_option("--alpha", w_alphas, "comma-separated alpha list");
  w_cmd->add_option("--plist", w_plist, "p list start:stop:step or comma list");
  w_cmd->add_option("--nrange", w_nrange, "n range a..b or comma list");
  w_cmd->add_option("--nr", w_nr, "radial resolution");
  w_cmd->add_option("--ntheta", w_ntheta, "angular cells per sector");
  w_cmd->add_option("--init", w_init, "initial guess kind");
  w_cmd->add_option("--seed", w_seed, "random seed");
  w_cmd->add_option("--restarts", w_restarts, "restarts per cell");
  w_cmd->add_option("--grading", w_grading, "uniform|boundary");
  w_cmd->add_option("--out", w_out, "output directory");
  w_cmd->set_config("--config");

  // ---- classify ----
  auto* t_cmd = app.add_subcommand("classify", "nodal segmentation and case classification");
  std::string t_field, t_labels;
  double t_band = 1e-3;
  bool t_json = false;
  t_cmd->add_option("--field", t_field, "field CSV written by solve")->required();
  t_cmd->add_option("--band-eps", t_band, "zero-band epsilon (relative)");
  t_cmd->add_option("--labels", t_labels, "optional region-label CSV output path");
  t_cmd->add_flag("--json", t_json, "emit JSON");
  t_cmd->set_config("--config");

  // ---- morse ----
  auto* m_cmd = app.add_subcommand("morse", "Morse index of the linearized operator");
  std::string m_field;
  bool m_full = false, m_json = false, m_radial = false;
  double m_alpha = 0.0, m_p = 10.0;
  int m_nr = 512, m_kmax = 12;
  m_cmd->add_option("--field", m_field, "field CSV written by solve");
  m_cmd->add_flag("--full", m_full, "count over the full space instead of the n-invariant one");
  m_cmd->add_flag("--radial", m_radial, "radial baseline: 1-D mode decomposition");
  m_cmd->add_option("--alpha", m_alpha, "alpha (radial mode)");
  m_cmd->add_option("--p", m_p, "p (radial mode)");
  m_cmd->add_option("--nr", m_nr, "radial resolution (radial mode)");
  m_cmd->add_option("--kmax", m_kmax, "largest angular mode (radial mode)");
  m_cmd->add_flag("--json", m_json, "emit JSON");
  m_cmd->set_config("--config");

  // ---- report ----
  auto* p_cmd = app.add_subcommand("report", "tabulate a sweep directory against the targets");
  std::string p_dir, p_out;
  p_cmd->add_option("--sweep", p_dir, "sweep output directory")->required();
  p_cmd->add_option("--out", p_out, "directory for report.md/report.csv (default: sweep dir)");
  p_cmd->set_config("--config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return (e.get_exit_code() == 0) ? 0 : kExitUsage;
  }

  try {
    if (*c_cmd) {
      const auto alphas = parse_alpha_list(c_alphas);
      const json rec = constants_record(alphas);
      if (c_json)
        std::cout << rec.dump(2) << "\n";
      else
        print_constants_table(rec);
      return 0;
    }

    if (*r_cmd) {
      if (!r_plist.empty()) {
        const auto ps = parse_p_list(r_plist);
        const auto rows = radial_energy_table(r_alpha, ps);
        json arr = json::array();
        bool any_err = false;
        for (const auto& row : rows) {
          arr.push_back({{"p", row.p},
                         {"p_energy", row.p_energy},
                         {"target", row.target},
                         {"gap", row.gap},
                         {"ok", row.ok},
                         {"error", row.error}});
          any_err = any_err || !row.ok;
          if (!r_json)
            std::cout << "p=" << format_g10(row.p) << "  p*E_p=" << format_g10(row.p_energy)
                      << "  target=" << format_g10(row.target) << "  gap=" << format_g10(row.gap)
                      << (row.ok ? "" : "  ERROR " + row.error) << "\n";
        }
        if (r_json) std::cout << arr.dump(2) << "\n";
        return any_err ? kExitSolver : 0;
      }
      const RadialProfile prof = radial_two_zone(r_alpha, r_p, 1e-10);
      fs::create_directories(r_out);
      std::ostringstream name;
      name << "radial_a" << format_g10(r_alpha) << "_p" << format_g10(r_p) << ".csv";
      dump_radial_profile_csv((fs::path(r_out) / name.str()).string(), prof);
      const json rec = radial_record(prof);
      std::cout << (r_json ? rec.dump(2) : rec.dump(2)) << "\n";
      return 0;
    }

    if (*s_cmd) {
      const ProblemParams params(s_alpha, s_p, s_n);
      const SectorMesh mesh = build_mesh(s_n, s_nr, s_ntheta, parse_grading(s_grading), s_alpha);
      SolveConfig cfg;
      cfg.init_kind = s_init;
      cfg.random_seed = s_seed;
      cfg.restarts = s_restarts;
      cfg.residual_tolerance = s_rtol;
      const Solution sol = minimize(cfg, params, mesh);
      fs::create_directories(s_out);
      std::ostringstream base;
      base << "solution_a" << format_g10(s_alpha) << "_p" << format_g10(s_p) << "_n" << s_n;
      const std::string csv = (fs::path(s_out) / (base.str() + ".csv")).string();
      dump_field_csv(csv, mesh, sol.field, s_p, "sector");
      json rec = solution_record(mesh, sol);
      rec["field_csv"] = csv;
      std::ofstream(fs::path(s_out) / (base.str() + ".json")) << rec.dump(2) << "\n";
      std::cout << rec.dump(2) << "\n";
      return sol.converged ? 0 : kExitSolver;
    }

    if (*w_cmd) {
      SweepConfig cfg;
      cfg.nr = w_nr;
      cfg.ntheta = w_ntheta;
      cfg.grading = parse_grading(w_grading);
      cfg.solve.init_kind = w_init;
      cfg.solve.random_seed = w_seed;
      cfg.solve.restarts = w_restarts;
      const SweepResult res =
          run_sweep(parse_alpha_list(w_alphas), parse_p_list(w_plist), parse_n_range(w_nrange), cfg);
      write_sweep_outputs(res, cfg, w_out);
      std::cout << phase_csv(res);
      if (res.any_failure) return kExitSolver;
      if (res.any_flag) return kExitFinding;
      return 0;
    }

    if (*t_cmd) {
      const LoadedField lf = load_field_csv(t_field);
      const ProblemParams params(lf.mesh.alpha, lf.p, lf.n_sym);
      const NodalReport rep = analyze_field(lf.mesh, lf.field, params, t_band);
      if (!t_labels.empty()) {
        const Segmentation seg = segment(lf.mesh, lf.field, t_band, lf.n_sym);
        dump_region_labels_csv(t_labels, seg);
      }
      std::cout << nodal_record(rep).dump(2) << "\n";
      return rep.case_consistent ? 0 : kExitFinding;
    }

    if (*m_cmd) {
      if (m_radial) {
        const RadialProfile prof = radial_two_zone(m_alpha, m_p, 1e-10);
        const ModeDecomposition md = radial_mode_decomposition(prof, m_p, m_kmax, m_nr,
                                                               Grading::Uniform);
        json rec;
        rec["counts"] = md.counts;
        rec["m_rad"] = md.m_rad();
        rec["total"] = md.total();
        rec["smallest_eigenvalues"] = md.smallest_eigenvalues;
        std::cout << rec.dump(2) << "\n";
        return 0;
      }
      if (m_field.empty())
        throw ConfigError("morse: provide --field FILE or --radial");
      const LoadedField lf = load_field_csv(m_field);
      const SpectralReport rep = m_full ? morse_index_full(lf.mesh, lf.field, lf.p)
                                        : morse_index_symmetric(lf.mesh, lf.field, lf.p);
      std::cout << spectral_record(rep).dump(2) << "\n";
      return rep.converged ? 0 : kExitSolver;
    }

    if (*p_cmd) {
      const ReportResult rep = make_report(p_dir);
      const std::string out_dir = p_out.empty() ? p_dir : p_out;
      fs::create_directories(out_dir);
      write_text_file((fs::path(out_dir) / "report.md").string(), rep.markdown);
      write_text_file((fs::path(out_dir) / "report.csv").string(), rep.csv);
      std::cout << rep.markdown;
      return rep.flagged_rows > 0 ? kExitFinding : 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
