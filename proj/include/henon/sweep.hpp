#pragma once

#include <string>
#include <vector>

#include "henon/io.hpp"
#include "henon/nehari.hpp"

namespace henon {

inline constexpr const char* kToolVersion = "0.1.0";

struct SweepConfig {
  int nr = 96;
  int ntheta = 48;
  Grading grading = Grading::Uniform;
  double band_epsilon = 1e-3;
  SolveConfig solve;
  int threads = 0;  // 0 = HENON_THREADS, else hardware
  bool write_fields = true;
};

struct CellResult {
  ProblemParams params{0.0, 2.0, 1};
  bool converged = false;
  bool failed = false;  // solver raised
  std::string error;
  double energy = 0.0;
  double p_energy = 0.0;
  std::string case_name = "other";
  int m_n = -1;
  int region_count = 0;
  bool consistent = false;
  std::string predicted_admissible;
  double wall_ms = 0.0;
  json record;  // full per-cell json (solution + nodal + spectral)
};

struct SweepResult {
  std::vector<CellResult> cells;
  bool any_failure = false;
  bool any_flag = false;  // a consistency finding
};

CellResult run_cell(const ProblemParams& params, const SweepConfig& cfg);

SweepResult run_sweep(const std::vector<double>& alphas, const std::vector<double>& ps,
                      const std::vector<int>& ns, const SweepConfig& cfg);

// writes one JSON per cell, manifest.json and phase.csv into out_dir
void write_sweep_outputs(const SweepResult& res, const SweepConfig& cfg,
                         const std::string& out_dir);

std::string phase_csv(const SweepResult& res);

// reads a sweep directory and renders the comparison tables
struct ReportResult {
  std::string markdown;
  std::string csv;
  int flagged_rows = 0;
  std::vector<std::string> bad_files;
};
ReportResult make_report(const std::string& sweep_dir);

// parse helpers shared with the CLI: "start:stop:step" or comma list; "a..b"
std::vector<double> parse_p_list(const std::string& text);
std::vector<int> parse_n_range(const std::string& text);
std::vector<double> parse_alpha_list(const std::string& text);

int worker_count(int requested, int cells);

}  // namespace henon
