#include "henon/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "henon/spectrum.hpp"
#include "henon/topology.hpp"

namespace henon {

namespace fs = std::filesystem;

namespace {

std::string admissible_set(const CasePrediction& pred, int n) {
  std::string s;
  if (n <= pred.case1_max_n) s += "1;";
  if (n <= pred.case2_max_n) s += "2;";
  s += "3";
  return s;
}

}  // namespace

CellResult run_cell(const ProblemParams& params, const SweepConfig& cfg) {
  CellResult cell;
  cell.params = params;
  const auto t0 = std::chrono::steady_clock::now();
  const CasePrediction pred = predict_cases(params);
  cell.predicted_admissible = admissible_set(pred, params.n);
  try {
    const SectorMesh mesh = build_mesh(params.n, cfg.nr, cfg.ntheta, cfg.grading, params.alpha);
    const Solution sol = minimize(cfg.solve, params, mesh);
    cell.converged = sol.converged;
    cell.energy = sol.energy;
    cell.p_energy = sol.scaled_energy;

    const NodalReport rep = analyze_field(mesh, sol.field, params, cfg.band_epsilon);
    cell.case_name = to_string(rep.nodal_case);
    cell.region_count = rep.region_count;

    const SpectralReport spec = morse_index_symmetric(mesh, sol.field, params.p);
    cell.m_n = spec.negative_count;

    cell.consistent =
        sol.converged && rep.case_consistent && rep.region_count <= pred.max_regions;

    cell.record["solution"] = solution_record(mesh, sol);
    cell.record["nodal"] = nodal_record(rep);
    cell.record["spectrum"] = spectral_record(spec);
    cell.record["predicted"] = {{"admissible", cell.predicted_admissible},
                                {"max_regions", pred.max_regions},
                                {"case1_max_n", pred.case1_max_n},
                                {"case2_max_n", pred.case2_max_n},
                                {"multiplicity", pred.multiplicity},
                                {"guaranteed_quasiradial", pred.guaranteed_quasiradial}};
    cell.record["consistent"] = cell.consistent;
    if (cfg.write_fields) {
      // the field itself is written by the caller (needs the output directory)
      cell.record["field"] = nullptr;
    }
  } catch (const std::exception& e) {
    cell.failed = true;
    cell.error = e.what();
    cell.record["error"] = cell.error;
  }
  const auto t1 = std::chrono::steady_clock::now();
  cell.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  cell.record["wall_ms"] = cell.wall_ms;
  return cell;
}

int worker_count(int requested, int cells) {
  int w = requested;
  if (w <= 0) {
    if (const char* env = std::getenv("HENON_THREADS")) w = std::atoi(env);
  }
  if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
  if (w <= 0) w = 1;
  return std::max(1, std::min(w, cells));
}

SweepResult run_sweep(const std::vector<double>& alphas, const std::vector<double>& ps,
                      const std::vector<int>& ns, const SweepConfig& cfg) {
  std::vector<ProblemParams> grid;
  for (double a : alphas)
    for (double p : ps)
      for (int n : ns) grid.emplace_back(a, p, n);

  SweepResult res;
  res.cells.resize(grid.size());
  const int workers = worker_count(cfg.threads, static_cast<int>(grid.size()));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t k = next.fetch_add(1);
      if (k >= grid.size()) return;
      SweepConfig cell_cfg = cfg;
      // distinct deterministic seed per cell, independent of worker count
      cell_cfg.solve.random_seed = cfg.solve.random_seed + 7919UL * k;
      res.cells[k] = run_cell(grid[k], cell_cfg);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (const auto& c : res.cells) {
    res.any_failure = res.any_failure || c.failed || !c.converged;
    res.any_flag = res.any_flag || (!c.failed && !c.consistent);
  }
  return res;
}

std::string phase_csv(const SweepResult& res) {
  std::ostringstream out;
  out << "alpha,p,n,case,regions,m_n,p_energy,predicted_admissible,consistent\n";
  for (const auto& c : res.cells) {
    out << format_g10(c.params.alpha) << "," << format_g10(c.params.p) << "," << c.params.n << ","
        << c.case_name << "," << c.region_count << "," << c.m_n << ","
        << format_g17(c.p_energy) << "," << c.predicted_admissible << ","
        << (c.consistent ? "true" : "false") << "\n";
  }
  return out.str();
}

void write_sweep_outputs(const SweepResult& res, const SweepConfig& cfg,
                         const std::string& out_dir) {
  fs::create_directories(out_dir);
  json manifest;
  {
    std::ostringstream id;
    id << std::chrono::duration_cast<std::chrono::seconds>(
              std::chrono::system_clock::now().time_since_epoch())
              .count()
       << "-" << cfg.solve.random_seed;
    manifest["run_id"] = id.str();
  }
  manifest["tool_version"] = kToolVersion;
  manifest["config"] = {{"nr", cfg.nr},
                        {"ntheta", cfg.ntheta},
                        {"grading", cfg.grading == Grading::Uniform ? "uniform" : "boundary"},
                        {"band_epsilon", cfg.band_epsilon},
                        {"seed", cfg.solve.random_seed},
                        {"restarts", cfg.solve.restarts},
                        {"init", cfg.solve.init_kind},
                        {"residual_tolerance", cfg.solve.residual_tolerance},
                        {"nehari_tolerance", cfg.solve.nehari_tolerance},
                        {"max_iterations", cfg.solve.max_iterations}};
  json cells = json::array();
  for (const auto& c : res.cells) {
    std::ostringstream name;
    name << "cell_a" << format_g10(c.params.alpha) << "_p" << format_g10(c.params.p) << "_n"
         << c.params.n << ".json";
    std::ofstream(fs::path(out_dir) / name.str()) << c.record.dump(2) << "\n";
    cells.push_back({{"alpha", c.params.alpha},
                     {"p", c.params.p},
                     {"n", c.params.n},
                     {"file", name.str()},
                     {"converged", c.converged},
                     {"failed", c.failed},
                     {"energy", c.energy},
                     {"case", c.case_name},
                     {"m_n", c.m_n},
                     {"region_count", c.region_count},
                     {"consistent", c.consistent},
                     {"wall_ms", c.wall_ms}});
  }
  manifest["cells"] = cells;
  std::ofstream(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << "\n";
  write_text_file((fs::path(out_dir) / "phase.csv").string(), phase_csv(res));
}

ReportResult make_report(const std::string& sweep_dir) {
  ReportResult rep;
  if (!fs::is_directory(sweep_dir)) throw std::runtime_error("report: no such directory: " + sweep_dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(sweep_dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("cell_", 0) == 0 && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("report: no cell files in " + sweep_dir);

  const double gamma = AsymptoticConstants::get().gamma;
  const double e8pi = 8.0 * M_PI * M_E;
  const double e4pi = 4.0 * M_PI * M_E;

  std::ostringstream md, csv;
  md << "# Sweep report\n\n";
  md << "Radial baseline target per alpha: 2(2+alpha)*gamma*pi*e with gamma = " << format_g10(gamma)
     << " (quoted value 4.859).\n\n";
  md << "| alpha | p | n | case | regions | m_n | p*E_p | target | regions<=N_a | m_n==2 | consistent | status |\n";
  md << "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  csv << "alpha,p,n,case,regions,m_n,p_energy,target,region_ratio_8pie_min,consistent,status\n";

  for (const auto& f : files) {
    json j;
    try {
      std::ifstream in(f);
      in >> j;
      const auto& sol = j.at("solution");
      const auto& nod = j.at("nodal");
      const double alpha = sol.at("alpha").get<double>();
      const double p = sol.at("p").get<double>();
      const int n = sol.at("n").get<int>();
      const double pe = sol.at("scaled_energy").get<double>();
      const double target = 2.0 * (2.0 + alpha) * gamma * M_PI * M_E;
      const int regions = nod.at("region_count").get<int>();
      const int m_n = j.at("spectrum").at("negative_count").get<int>();
      const bool consistent = j.value("consistent", false);
      const int n_alpha = j.at("predicted").at("max_regions").get<int>();

      double min_ratio = std::numeric_limits<double>::infinity();
      for (const auto& r : nod.at("regions"))
        min_ratio = std::min(min_ratio, r.at("scaled_dirichlet").get<double>() / e8pi);

      const bool ok_regions = regions <= n_alpha;
      const bool ok_mn = (m_n == 2);
      const bool pass = consistent && ok_regions && ok_mn;
      if (!pass) ++rep.flagged_rows;
      md << "| " << format_g10(alpha) << " | " << format_g10(p) << " | " << n << " | "
         << nod.at("case").get<std::string>() << " | " << regions << " | " << m_n << " | "
         << format_g10(pe) << " | " << format_g10(target) << " | " << (ok_regions ? "yes" : "FLAG")
         << " | " << (ok_mn ? "yes" : "FLAG") << " | " << (consistent ? "yes" : "FLAG") << " | "
         << (pass ? "pass" : "flag") << " |\n";
      csv << format_g10(alpha) << "," << format_g10(p) << "," << n << ","
          << nod.at("case").get<std::string>() << "," << regions << "," << m_n << ","
          << format_g17(pe) << "," << format_g17(target) << "," << format_g17(min_ratio) << ","
          << (consistent ? "true" : "false") << "," << (pass ? "pass" : "flag") << "\n";
    } catch (const std::exception&) {
      rep.bad_files.push_back(f.filename().string());
    }
  }
  if (!rep.bad_files.empty()) {
    md << "\nUnreadable cell files:\n";
    for (const auto& b : rep.bad_files) md << "- " << b << "\n";
  }
  md << "\nPer-region lower-bound reference: 8*pi*e = " << format_g10(e8pi)
     << ", 4*pi*e = " << format_g10(e4pi) << " (asymptotic bounds, ratios reported in cells).\n";
  rep.markdown = md.str();
  rep.csv = csv.str();
  return rep;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<double> parse_p_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("p list: expected start:stop:step");
    const double start = std::stod(parts[0]), stop = std::stod(parts[1]), step = std::stod(parts[2]);
    if (!(step > 0.0)) throw ConfigError("p list: step must be positive");
    for (double v = start; v <= stop + 1e-12 * std::abs(stop); v += step) out.push_back(v);
  } else {
    for (const auto& s : split(text, ',')) {
      if (!s.empty()) out.push_back(std::stod(s));
    }
  }
  if (out.empty()) throw ConfigError("p list: empty");
  for (double p : out)
    if (!(p > 1.0)) throw ConfigError("p list: every p must be > 1");
  return out;
}

std::vector<int> parse_n_range(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int a = std::stoi(text.substr(0, dots));
    const int b = std::stoi(text.substr(dots + 2));
    if (a < 1 || b < a) throw ConfigError("n range: expected a..b with 1 <= a <= b");
    for (int n = a; n <= b; ++n) out.push_back(n);
  } else {
    for (const auto& s : split(text, ','))
      if (!s.empty()) out.push_back(std::stoi(s));
  }
  if (out.empty()) throw ConfigError("n range: empty");
  for (int n : out)
    if (n < 1) throw ConfigError("n range: every n must be >= 1");
  return out;
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text, ','))
    if (!s.empty()) out.push_back(std::stod(s));
  if (out.empty()) throw ConfigError("alpha list: empty");
  for (double a : out)
    if (!(a >= 0.0)) throw ConfigError("alpha list: every alpha must be >= 0");
  return out;
}

}  // namespace henon
