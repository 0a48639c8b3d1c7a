#include "henon/constants.hpp"

#include <cmath>

namespace henon {

double tbar_residual(double t) {
  return 2.0 * std::sqrt(M_E) * std::log(t) + t;
}

double solve_tbar(double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("solve_tbar: tolerance must be > 0");
  double lo = 0.1, hi = 1.0;
  // residual(0.1) < 0 < residual(1.0)
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = tbar_residual(mid);
    if (std::abs(f) <= tolerance) break;
    if (f < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

double kappa_from_tbar(double tbar) {
  return 1.0 + 2.0 * std::sqrt(M_E) / tbar;
}

double gamma_from_tbar(double tbar) {
  const double se = std::sqrt(M_E);
  return std::exp(-se / (tbar + se)) * (M_E / (tbar * tbar) + 1.0 + 2.0 * se / tbar);
}

AsymptoticConstants AsymptoticConstants::compute(double tolerance) {
  AsymptoticConstants c;
  c.tbar = solve_tbar(tolerance);
  c.kappa = kappa_from_tbar(c.tbar);
  c.gamma = gamma_from_tbar(c.tbar);
  return c;
}

const AsymptoticConstants& AsymptoticConstants::get() {
  static const AsymptoticConstants cached = compute(1e-14);
  return cached;
}

namespace {
constexpr double kIntGuard = 1e-9;
}

long guarded_floor(double x) {
  return static_cast<long>(std::floor(x + kIntGuard));
}

long guarded_ceil(double x) {
  return static_cast<long>(std::ceil(x - kIntGuard));
}

int multiplicity_lower_bound(double alpha) {
  return multiplicity_lower_bound(alpha, AsymptoticConstants::get());
}

int multiplicity_lower_bound(double alpha, const AsymptoticConstants& c) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("multiplicity_lower_bound: alpha must be >= 0");
  return static_cast<int>(guarded_ceil(0.5 * (2.0 + alpha) * c.kappa - 1.0));
}

int max_nodal_regions(double alpha) {
  return max_nodal_regions(alpha, AsymptoticConstants::get());
}

int max_nodal_regions(double alpha, const AsymptoticConstants& c) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("max_nodal_regions: alpha must be >= 0");
  return static_cast<int>(guarded_floor(0.5 * (2.0 + alpha) * c.gamma));
}

CasePrediction predict_cases(const ProblemParams& params) {
  return predict_cases(params, AsymptoticConstants::get());
}

CasePrediction predict_cases(const ProblemParams& params, const AsymptoticConstants& c) {
  CasePrediction out;
  const double s = 2.0 + params.alpha;
  out.max_regions = max_nodal_regions(params.alpha, c);
  out.case1_max_n = static_cast<int>(guarded_floor(0.25 * s * c.gamma));
  out.case2_max_n = static_cast<int>(guarded_floor(0.5 * s * c.gamma - 1.0));
  out.case1_admissible = params.n <= out.case1_max_n;
  out.case2_admissible = params.n <= out.case2_max_n;
  out.case3_forced = !out.case1_admissible && !out.case2_admissible;
  out.multiplicity = multiplicity_lower_bound(params.alpha, c);
  out.guaranteed_quasiradial = std::max(0, out.multiplicity - out.case2_max_n);
  return out;
}

}  // namespace henon
