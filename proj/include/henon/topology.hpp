#pragma once

#include <optional>
#include <string>
#include <vector>

#include "henon/constants.hpp"
#include "henon/mesh.hpp"

namespace henon {

enum class NodalCase { Radial, Case1, Case2, Case3, Other };
std::string to_string(NodalCase c);

struct RegionInfo {
  int sign = 0;
  long node_count = 0;
  bool is_n_invariant = false;
  bool touches_boundary = false;  // reaches within 2 radial cells of r = 1
  bool contains_origin = false;
  bool spans_all_rays = false;
  double dirichlet_energy = 0.0;
  double scaled_dirichlet = 0.0;  // p * dirichlet part
  double scaled_energy = 0.0;     // p * (1/2 grad - 1/(p+1) weighted) on the region
};

struct ZeroComponentInfo {
  long node_count = 0;
  bool contains_origin = false;
  bool touches_boundary = false;
};

// Sign segmentation of the unfolded full-disc grid. Nodes with
// |u| < band_epsilon * max|u| form the zero band; regions are 4-connected
// components of the signed nodes (angular wraparound, pole adjacent to the
// whole first ring). The Dirichlet ring never carries a label.
struct Segmentation {
  SectorMesh full;  // unfolded mesh, n = 1
  Field field;      // unfolded field
  int n_sym = 1;    // symmetry order of the source mesh
  double band_epsilon = 0.0;
  Eigen::ArrayXXi label;  // (n_r-1) x full.n_theta, -1 = zero band
  int pole_label = -1;
  std::vector<RegionInfo> regions;
  std::vector<ZeroComponentInfo> zero_components;
  double zero_band_fraction = 0.0;

  int region_count() const { return static_cast<int>(regions.size()); }
};

// n_override replaces the mesh symmetry order (used when a full-disc grid of
// an n-invariant field is analyzed on an n = 1 mesh); 0 keeps mesh.n
Segmentation segment(const SectorMesh& mesh, const Field& f, double band_epsilon,
                     int n_override = 0);

// components of the restriction to one fundamental sector, minimized over the
// grid rotations of the sector (a rotation-independent count)
int sector_region_count(const Segmentation& seg);

// largest number of whole regions strictly inside some rotated open sector
// (the quantity bounded by 2 for converged minimizers)
int max_regions_strictly_in_sector(const Segmentation& seg);

struct NodalReport {
  int region_count = 0;
  int sector_region_count = 0;
  std::vector<RegionInfo> regions;
  NodalCase nodal_case = NodalCase::Other;
  bool quasiradial = false;
  double zero_band_fraction = 0.0;
  double monotonicity_violation = 0.0;
  double bisector_asymmetry = 0.0;
  bool origin_in_nodal_set = false;
  bool nodal_set_touches_boundary = false;
  double band_epsilon = 0.0;
  bool band_stable = true;  // region count unchanged under halving/doubling the band
  int origin_arc_order = -1;  // -1 = origin not in the zero band
  int max_strictly_in_sector = 0;
  bool case_consistent = true;  // observed case admissible under the thresholds
};

// classification tolerance: relative angular variation below which the field
// counts as radial
inline constexpr double kRadialTol = 1e-6;

NodalCase classify(const Segmentation& seg, const ProblemParams& params,
                   double radial_tol = kRadialTol);

// maximal positive part of the discrete angular derivative on the semi-sector
// after the best grid alignment (0 = monotone as required)
double check_angular_monotonicity(const SectorMesh& mesh, const Field& f, int n);

// relative L2 mismatch with the bisector reflection after the best alignment
double check_bisector_symmetry(const SectorMesh& mesh, const Field& f, int n);

std::optional<int> origin_arc_order(const SectorMesh& mesh, const Field& f, double band_epsilon);

struct PerRegionEnergy {
  double dirichlet = 0.0;
  double scaled_dirichlet = 0.0;
  double scaled_energy = 0.0;
  double ratio_8pie = 0.0;  // scaled_dirichlet / (8 pi e)
  double ratio_4pie = 0.0;  // scaled_energy / (4 pi e)
};

// per-region split of the energies; cross edges are shared half/half and
// zero-band nodes are attached to the nearest region so the parts add up to
// the totals exactly
std::vector<PerRegionEnergy> per_region_energy(const Segmentation& seg, double p);

// full analysis used by the CLI and the sweeps
NodalReport analyze_field(const SectorMesh& mesh, const Field& f, const ProblemParams& params,
                          double band_epsilon = 1e-3, double radial_tol = kRadialTol);

}  // namespace henon
