#pragma once

#include <string>
#include <vector>

#include "henon/constants.hpp"
#include "henon/mesh.hpp"
#include "henon/radial.hpp"

namespace henon {

struct SolveConfig {
  std::string init_kind = "auto";  // radial-perturbed | two-bump | annular-split | auto
  double perturbation_amplitude = 0.12;
  double step_size = 1.0;
  int max_iterations = 3000;
  double residual_tolerance = 1e-9;
  double nehari_tolerance = 1e-10;
  unsigned long random_seed = 1;
  int restarts = 3;
  // descent hands over to a Newton polish once the residual drops below this;
  // plain projected descent stalls near the discrete manifold at the cross-edge
  // scale O(h), Newton drives the discrete PDE residual to the tolerance
  double newton_switch = 5e-4;
  int newton_max = 60;

  void validate() const;
};

struct Solution {
  Field field;
  ProblemParams params;
  double energy = 0.0;
  double scaled_energy = 0.0;  // p * E_p
  double dirichlet = 0.0;
  double residual = 0.0;
  // discrete analogues of E'(u)u^+ = 0, E'(u)u^- = 0, in the pairing form
  // <grad u, grad u^+-> - int |x|^a |u^+-|^{p+1}, relative
  double nehari_defect_plus = 0.0;
  double nehari_defect_minus = 0.0;
  int iterations_used = 0;
  std::string init_kind;
  unsigned long seed = 0;
  bool converged = false;
  bool sign_change = false;
  std::vector<double> energy_trace;    // accepted descent energies, nonincreasing
  std::vector<double> basin_energies;  // best energy of each converged restart
  bool multi_basin = false;
};

// sigma u with sigma = (int |grad u|^2 / int |x|^a |u|^{p+1})^{1/(p-1)},
// evaluated in the log domain. Throws on the zero field.
Field nehari_scale(const SectorMesh& mesh, const Field& f, double p);

// relative defect of the plain Nehari identity on f
double nehari_defect(const SectorMesh& mesh, const Field& f, double p);

// u^+ and u^- scaled independently (their edge-form energies are
// self-contained, so the two constraints decouple). Throws on sign-definite
// fields.
Field nodal_nehari_project(const SectorMesh& mesh, const Field& f, double p);

// n-invariant initial fields; deterministic in the seed. radial may be null,
// the radial two-zone profile is computed on demand when a kind needs it.
Field initial_guess(const std::string& kind, const SectorMesh& mesh, const ProblemParams& params,
                    unsigned long seed, double amplitude, const RadialProfile* radial = nullptr);

Solution minimize(const SolveConfig& config, const ProblemParams& params, const SectorMesh& mesh);

}  // namespace henon
