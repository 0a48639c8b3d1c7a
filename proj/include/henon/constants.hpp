#pragma once

#include <stdexcept>

namespace henon {

// Parameters of one variational problem on the unit disc:
//   -Delta u = |x|^alpha |u|^(p-1) u,  u = 0 on the boundary,
// minimized over fields invariant under rotation by 2*pi/n.
struct ProblemParams {
  double alpha = 0.0;  // radial weight exponent, >= 0
  double p = 2.0;      // nonlinearity exponent, > 1
  int n = 1;           // rotational symmetry order, >= 1

  ProblemParams() = default;
  ProblemParams(double alpha_, double p_, int n_) : alpha(alpha_), p(p_), n(n_) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("ProblemParams: alpha must be >= 0");
    if (!(p > 1.0)) throw std::invalid_argument("ProblemParams: p must be > 1");
    if (n < 1) throw std::invalid_argument("ProblemParams: n must be >= 1");
  }
};

// tbar is the unique root in (0,1) of  2*sqrt(e)*log(t) + t = 0.
// kappa and gamma are derived from it; gamma_paper keeps the rounded value
// quoted in the literature, which differs from the formula evaluation in the
// third decimal (4.859 vs ~4.864). Both are reported, the formula value is
// what the thresholds use.
struct AsymptoticConstants {
  double tbar;
  double kappa;
  double gamma;

  static constexpr double gamma_paper = 4.859;

  static const AsymptoticConstants& get();  // cached, tol = 1e-14
  static AsymptoticConstants compute(double tolerance);
};

// Residual of the defining equation for tbar.
double tbar_residual(double t);

// Bisection on [0.1, 1.0]; the residual has opposite signs at the ends.
double solve_tbar(double tolerance);

double kappa_from_tbar(double tbar);
double gamma_from_tbar(double tbar);

// Floor/ceiling with a 1e-9 guard so values that are exact integers in exact
// arithmetic do not flip under floating-point noise.
long guarded_floor(double x);
long guarded_ceil(double x);

// ceil((2+alpha)/2 * kappa - 1): number of distinct nodal nonradial solutions
// guaranteed for large p.
int multiplicity_lower_bound(double alpha);
int multiplicity_lower_bound(double alpha, const AsymptoticConstants& c);

// floor((2+alpha)/2 * gamma): maximal number of nodal regions N_alpha.
int max_nodal_regions(double alpha);
int max_nodal_regions(double alpha, const AsymptoticConstants& c);

// Admissibility thresholds for the three nodal topologies and the derived
// counts. case3 is never excluded; it is forced when n exceeds both
// thresholds.
struct CasePrediction {
  int max_regions = 0;            // N_alpha
  int case1_max_n = 0;            // floor((2+alpha)/4 * gamma)
  int case2_max_n = 0;            // floor((2+alpha)/2 * gamma - 1)
  bool case1_admissible = false;  // n <= case1_max_n
  bool case2_admissible = false;  // n <= case2_max_n
  bool case3_forced = false;      // n > case2_max_n
  int multiplicity = 0;           // multiplicity_lower_bound(alpha)
  int guaranteed_quasiradial = 0; // multiplicity - case2_max_n, floored at 0
};

CasePrediction predict_cases(const ProblemParams& params);
CasePrediction predict_cases(const ProblemParams& params, const AsymptoticConstants& c);

}  // namespace henon
