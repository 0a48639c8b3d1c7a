#include "henon/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace henon {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

namespace {
std::string grading_name(Grading g) {
  return g == Grading::Uniform ? "uniform" : "boundary";
}
Grading grading_from(const std::string& s) {
  if (s == "uniform") return Grading::Uniform;
  if (s == "boundary") return Grading::Boundary;
  throw std::runtime_error("unknown grading '" + s + "'");
}
}  // namespace

void dump_field_csv(const std::string& path, const SectorMesh& mesh, const Field& f, double p,
                    const std::string& kind) {
  if (!compatible(mesh, f)) throw std::invalid_argument("dump_field_csv: field/mesh mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  json side = {{"kind", kind},         {"n", mesh.n},
               {"N_r", mesh.n_r},      {"N_theta", mesh.n_theta},
               {"alpha", mesh.alpha},  {"p", p},
               {"grading", grading_name(mesh.grading)}};
  out << "# " << side.dump() << "\n";
  out << "r,theta,value\n";
  out << "0,0," << format_g17(f.pole) << "\n";
  for (int i = 0; i < mesh.n_r; ++i)
    for (int j = 0; j < mesh.n_theta; ++j)
      out << format_g17(mesh.r[i]) << "," << format_g17(j * mesh.dtheta) << ","
          << format_g17(f.ring(i, j)) << "\n";
}

LoadedField load_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
    throw std::runtime_error("field csv: missing sidecar line in " + path);
  const json side = json::parse(line.substr(1));
  LoadedField lf;
  lf.kind = side.value("kind", "sector");
  const int n = side.at("n").get<int>();
  lf.n_sym = (lf.kind == "full") ? side.value("n_sym", n) : n;
  lf.p = side.at("p").get<double>();
  lf.mesh = build_mesh(n, side.at("N_r").get<int>(), side.at("N_theta").get<int>(),
                       grading_from(side.value("grading", "uniform")),
                       side.at("alpha").get<double>());
  if (!std::getline(in, line)) throw std::runtime_error("field csv: missing header");
  lf.field = zero_field(lf.mesh);
  if (!std::getline(in, line)) throw std::runtime_error("field csv: missing pole row");
  {
    std::istringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c);
    lf.field.pole = std::stod(c);
  }
  for (int i = 0; i < lf.mesh.n_r; ++i)
    for (int j = 0; j < lf.mesh.n_theta; ++j) {
      if (!std::getline(in, line)) throw std::runtime_error("field csv: truncated data");
      const auto last = line.rfind(',');
      lf.field.ring(i, j) = std::stod(line.substr(last + 1));
    }
  return lf;
}

void dump_region_labels_csv(const std::string& path, const Segmentation& seg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "r,theta,label\n";
  out << "0,0," << seg.pole_label << "\n";
  for (int i = 0; i + 1 < seg.full.n_r; ++i)
    for (int j = 0; j < seg.full.n_theta; ++j)
      out << format_g17(seg.full.r[i]) << "," << format_g17(j * seg.full.dtheta) << ","
          << seg.label(i, j) << "\n";
}

void dump_radial_profile_csv(const std::string& path, const RadialProfile& prof) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "r,value\n";
  for (int k = 0; k < prof.r.size(); ++k)
    out << format_g17(prof.r[k]) << "," << format_g17(prof.v[k]) << "\n";
}

json constants_record(const std::vector<double>& alphas) {
  const auto& c = AsymptoticConstants::get();
  json rec;
  rec["tbar"] = c.tbar;
  rec["tbar_residual"] = tbar_residual(c.tbar);
  rec["kappa"] = c.kappa;
  rec["gamma"] = c.gamma;
  rec["gamma_paper"] = AsymptoticConstants::gamma_paper;
  rec["gamma_discrepancy"] = c.gamma - AsymptoticConstants::gamma_paper;
  rec["gamma_note"] =
      "formula evaluation and the quoted 4.859 disagree in the third decimal; "
      "thresholds use the formula value";
  json table = json::array();
  for (double a : alphas) {
    const CasePrediction pred = predict_cases(ProblemParams(a, 2.0, 1));
    json row;
    row["alpha"] = a;
    row["multiplicity"] = pred.multiplicity;
    row["case1_max_n"] = pred.case1_max_n;
    row["case2_max_n"] = pred.case2_max_n;
    row["max_regions"] = pred.max_regions;
    row["guaranteed_quasiradial"] = pred.guaranteed_quasiradial;
    table.push_back(row);
  }
  rec["thresholds"] = table;
  return rec;
}

json radial_record(const RadialProfile& prof) {
  const double gamma = AsymptoticConstants::get().gamma;
  json rec;
  rec["p"] = prof.p;
  rec["alpha"] = prof.alpha;
  rec["interior_zero"] = prof.interior_zero;
  rec["central_value"] = prof.central_value;
  rec["dirichlet_energy"] = prof.grad_sq_integral;
  rec["grad_sq_inner"] = prof.grad_sq_inner;
  rec["grad_sq_outer"] = prof.grad_sq_outer;
  rec["weighted_pow_integral"] = prof.weighted_pow_integral;
  const double e = 0.5 * prof.grad_sq_integral - prof.weighted_pow_integral / (prof.p + 1.0);
  rec["p_energy"] = prof.p * e;
  rec["target"] = 2.0 * (2.0 + prof.alpha) * gamma * M_PI * M_E;
  rec["shoot_residual"] = prof.shoot_residual;
  return rec;
}

json solution_record(const SectorMesh& mesh, const Solution& sol) {
  json rec;
  rec["alpha"] = sol.params.alpha;
  rec["p"] = sol.params.p;
  rec["n"] = sol.params.n;
  rec["N_r"] = mesh.n_r;
  rec["N_theta"] = mesh.n_theta;
  rec["grading"] = grading_name(mesh.grading);
  rec["energy"] = sol.energy;
  rec["scaled_energy"] = sol.scaled_energy;
  rec["dirichlet_energy"] = sol.dirichlet;
  rec["residual"] = sol.residual;
  rec["nehari_defect_plus"] = sol.nehari_defect_plus;
  rec["nehari_defect_minus"] = sol.nehari_defect_minus;
  rec["iterations_used"] = sol.iterations_used;
  rec["init_kind"] = sol.init_kind;
  rec["seed"] = sol.seed;
  rec["converged"] = sol.converged;
  rec["sign_change"] = sol.sign_change;
  rec["basin_energies"] = sol.basin_energies;
  rec["multi_basin"] = sol.multi_basin;
  return rec;
}

json spectral_record(const SpectralReport& rep) {
  json rec;
  rec["negative_count"] = rep.negative_count;
  rec["marginal_count"] = rep.marginal_count;
  rec["smallest_eigenvalues"] = rep.smallest_eigenvalues;
  rec["subspace"] = rep.subspace;
  rec["grid"] = rep.grid;
  rec["method"] = rep.method;
  rec["converged"] = rep.converged;
  rec["count_stable"] = rep.count_stable;
  rec["scale"] = rep.scale;
  return rec;
}

json nodal_record(const NodalReport& rep) {
  json rec;
  rec["region_count"] = rep.region_count;
  rec["sector_region_count"] = rep.sector_region_count;
  rec["case"] = to_string(rep.nodal_case);
  rec["quasiradial"] = rep.quasiradial;
  rec["zero_band_fraction"] = rep.zero_band_fraction;
  rec["monotonicity_violation"] = rep.monotonicity_violation;
  rec["bisector_asymmetry"] = rep.bisector_asymmetry;
  rec["origin_in_nodal_set"] = rep.origin_in_nodal_set;
  rec["nodal_set_touches_boundary"] = rep.nodal_set_touches_boundary;
  rec["band_epsilon"] = rep.band_epsilon;
  rec["band_stable"] = rep.band_stable;
  rec["origin_arc_order"] = rep.origin_arc_order;
  rec["max_strictly_in_sector"] = rep.max_strictly_in_sector;
  rec["case_consistent"] = rep.case_consistent;
  json regions = json::array();
  for (const auto& r : rep.regions) {
    regions.push_back({{"sign", r.sign},
                       {"node_count", r.node_count},
                       {"is_n_invariant", r.is_n_invariant},
                       {"touches_boundary", r.touches_boundary},
                       {"contains_origin", r.contains_origin},
                       {"dirichlet_energy", r.dirichlet_energy},
                       {"scaled_dirichlet", r.scaled_dirichlet},
                       {"scaled_energy", r.scaled_energy}});
  }
  rec["regions"] = regions;
  return rec;
}

}  // namespace henon
