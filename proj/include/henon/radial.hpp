#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "henon/mesh.hpp"

namespace henon {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Radial profile on [0,1] with dense Hermite data (values and d/dr), the
// interior sign change, and the integrals accumulated alongside the ODE
// integration. All integrals are full-disc (the 2*pi factor is included).
struct RadialProfile {
  double p = 0.0;
  double alpha = 0.0;
  Eigen::VectorXd r;   // nodes, r[0] = 0, r[last] = 1
  Eigen::VectorXd v;   // profile values
  Eigen::VectorXd dv;  // d/dr values
  double interior_zero = 0.0;   // in (0,1); 0 for one-zone profiles
  double central_value = 0.0;   // u(0) > 0
  double grad_sq_integral = 0.0;      // integral over B of |grad u|^2
  double grad_sq_inner = 0.0;         // part over {r < interior_zero}
  double grad_sq_outer = 0.0;
  double weighted_pow_integral = 0.0; // integral of |x|^alpha |u|^{p+1}
  double shoot_residual = 0.0;        // |u(1)| after rescaling

  double eval(double rr) const;
  double eval_deriv(double rr) const;
};

// Raw shooting output in the unscaled variable, for oracle-style checks.
struct RadialShot {
  Eigen::VectorXd s, v, w;       // dense accepted nodes
  std::vector<double> zeros;     // refined zero locations, ascending
  double eval(double ss) const;
  double eval_deriv(double ss) const;
};

// Integrates v'' + v'/s + s^alpha |v|^{p-1} v = 0 from v(0)=central, v'(0)=0
// (series start at s = 1e-8) until `want_zeros` sign changes are located or
// s_max is reached. max_step limits the accepted step for dense output.
RadialShot shoot_radial_raw(double alpha, double p, double central, int want_zeros,
                            double s_max, double max_step, double zero_tol);

// Two-nodal-zone solution of the Lane-Emden problem (alpha = 0), rescaled so
// the second zero lands at r = 1 via v_d(r) = d v(d^{(p-1)/2} r).
RadialProfile lane_emden_nodal(double p, double tolerance);

// Two-nodal-zone solution of the Henon radial ODE by direct shooting in r.
RadialProfile radial_nodal(double alpha, double p, double tolerance);

// One-sign (positive) radial solution, first zero at r = 1.
RadialProfile radial_ground(double alpha, double p, double tolerance);

// Canonical two-zone Henon radial solution: Lane-Emden shooting mapped through
// the change of variables (the direct alpha-shooting in radial_nodal stays an
// independent route for cross-checks).
RadialProfile radial_two_zone(double alpha, double p, double tolerance);

// Exact change of variables u(r) = ((2+alpha)/2)^{2/(p-1)} v(r^{(2+alpha)/2});
// the profile integrals are recomputed by quadrature on the mapped profile,
// not copied through the transformation identity.
RadialProfile henon_from_lane_emden(const RadialProfile& le, double alpha);

struct RadialEnergyRow {
  double p = 0.0;
  double p_energy = 0.0;  // p * E_p(u)
  double target = 0.0;    // 2 (2+alpha) gamma pi e
  double gap = 0.0;
  bool ok = false;
  std::string error;
};

// Per-p scaled radial energies against the asymptotic target. The gap trend
// over the rows is left to the caller (the rate is not quantified).
std::vector<RadialEnergyRow> radial_energy_table(double alpha, const std::vector<double>& p_list);

// Samples a radial profile onto every ring of the mesh (Dirichlet row = 0,
// pole = central value).
Field interpolate_radial(const SectorMesh& mesh, const RadialProfile& profile);

}  // namespace henon
