#pragma once

#include <json.hpp>

#include <string>

#include "henon/constants.hpp"
#include "henon/mesh.hpp"
#include "henon/nehari.hpp"
#include "henon/radial.hpp"
#include "henon/spectrum.hpp"
#include "henon/topology.hpp"

namespace henon {

using json = nlohmann::json;

std::string format_g17(double v);
std::string format_g10(double v);

// Field dump: a '#'-prefixed JSON sidecar line with every parameter needed to
// rebuild the grid, a header line `r,theta,value`, then the pole row followed
// by the ring rows in (radial, angular) order at 17 significant digits.
void dump_field_csv(const std::string& path, const SectorMesh& mesh, const Field& f, double p,
                    const std::string& kind);

struct LoadedField {
  SectorMesh mesh;
  Field field;
  double p = 0.0;
  int n_sym = 1;  // symmetry order of the problem (mesh.n == 1 for full dumps)
  std::string kind;
};

LoadedField load_field_csv(const std::string& path);

void dump_region_labels_csv(const std::string& path, const Segmentation& seg);

void dump_radial_profile_csv(const std::string& path, const RadialProfile& prof);

json constants_record(const std::vector<double>& alphas);
json radial_record(const RadialProfile& prof);
json solution_record(const SectorMesh& mesh, const Solution& sol);
json spectral_record(const SpectralReport& rep);
json nodal_record(const NodalReport& rep);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace henon
