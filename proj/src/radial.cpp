#include "henon/radial.hpp"

#include <algorithm>
#include <cmath>

#include "henon/constants.hpp"

namespace henon {

namespace {

// state: v, w = v', qg = int s w^2 ds, qp = int s^{alpha+1} |v|^{p+1} ds
struct OdeState {
  double v, w, qg, qp;
};

struct Rhs {
  double alpha, p;
  inline OdeState operator()(double s, const OdeState& y) const {
    OdeState d;
    const double av = std::abs(y.v);
    const double nl = (av == 0.0) ? 0.0 : std::pow(av, p - 1.0) * y.v;
    d.v = y.w;
    d.w = -y.w / s - std::pow(s, alpha) * nl;
    d.qg = s * y.w * y.w;
    d.qp = std::pow(s, alpha + 1.0) * ((av == 0.0) ? 0.0 : std::pow(av, p + 1.0));
    return d;
  }
};

inline OdeState axpy(const OdeState& y, double h, const OdeState& k) {
  return {y.v + h * k.v, y.w + h * k.w, y.qg + h * k.qg, y.qp + h * k.qp};
}

// Dormand-Prince 5(4) step
struct DpResult {
  OdeState y5;
  double err;
};

DpResult dp_step(const Rhs& f, double s, const OdeState& y, double h) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  const OdeState k1 = f(s, y);
  const OdeState k2 = f(s + c2 * h, axpy(y, h * (1.0 / 5), k1));
  OdeState t = y;
  t = axpy(t, h * (3.0 / 40), k1);
  t = axpy(t, h * (9.0 / 40), k2);
  const OdeState k3 = f(s + c3 * h, t);
  t = y;
  t = axpy(t, h * (44.0 / 45), k1);
  t = axpy(t, h * (-56.0 / 15), k2);
  t = axpy(t, h * (32.0 / 9), k3);
  const OdeState k4 = f(s + c4 * h, t);
  t = y;
  t = axpy(t, h * (19372.0 / 6561), k1);
  t = axpy(t, h * (-25360.0 / 2187), k2);
  t = axpy(t, h * (64448.0 / 6561), k3);
  t = axpy(t, h * (-212.0 / 729), k4);
  const OdeState k5 = f(s + c5 * h, t);
  t = y;
  t = axpy(t, h * (9017.0 / 3168), k1);
  t = axpy(t, h * (-355.0 / 33), k2);
  t = axpy(t, h * (46732.0 / 5247), k3);
  t = axpy(t, h * (49.0 / 176), k4);
  t = axpy(t, h * (-5103.0 / 18656), k5);
  const OdeState k6 = f(s + h, t);
  OdeState y5 = y;
  y5 = axpy(y5, h * (35.0 / 384), k1);
  y5 = axpy(y5, h * (500.0 / 1113), k3);
  y5 = axpy(y5, h * (125.0 / 192), k4);
  y5 = axpy(y5, h * (-2187.0 / 6784), k5);
  y5 = axpy(y5, h * (11.0 / 84), k6);
  const OdeState k7 = f(s + h, y5);
  // embedded 4th-order difference
  OdeState e{0, 0, 0, 0};
  e = axpy(e, h * (71.0 / 57600), k1);
  e = axpy(e, h * (-71.0 / 16695), k3);
  e = axpy(e, h * (71.0 / 1920), k4);
  e = axpy(e, h * (-17253.0 / 339200), k5);
  e = axpy(e, h * (22.0 / 525), k6);
  e = axpy(e, h * (-1.0 / 40), k7);
  const double scale_v = 1.0 + std::abs(y.v);
  const double scale_w = 1.0 + std::abs(y.w);
  const double err = std::max(std::abs(e.v) / scale_v, std::abs(e.w) / scale_w);
  return {y5, err};
}

// fixed-substep RK4, used to refine event locations inside one accepted step
OdeState rk4_to(const Rhs& f, double s0, OdeState y, double s1, int substeps) {
  const double h = (s1 - s0) / substeps;
  for (int k = 0; k < substeps; ++k) {
    const double s = s0 + k * h;
    const OdeState k1 = f(s, y);
    const OdeState k2 = f(s + 0.5 * h, axpy(y, 0.5 * h, k1));
    const OdeState k3 = f(s + 0.5 * h, axpy(y, 0.5 * h, k2));
    const OdeState k4 = f(s + h, axpy(y, h, k3));
    y.v += h / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    y.w += h / 6.0 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w);
    y.qg += h / 6.0 * (k1.qg + 2 * k2.qg + 2 * k3.qg + k4.qg);
    y.qp += h / 6.0 * (k1.qp + 2 * k2.qp + 2 * k3.qp + k4.qp);
  }
  return y;
}

struct ShotInternal {
  std::vector<double> s, v, w;
  std::vector<double> zeros;
  std::vector<OdeState> zero_states;  // state at each refined zero
  OdeState final_state{};
  double final_s = 0.0;
};

OdeState series_start(double alpha, double p, double central, double s0) {
  const double ap2 = alpha + 2.0;
  OdeState y;
  const double b = std::pow(central, p) / (ap2 * ap2);
  y.v = central - b * std::pow(s0, ap2);
  y.w = -b * ap2 * std::pow(s0, ap2 - 1.0);
  y.qg = b * b * ap2 * ap2 * std::pow(s0, 2.0 * ap2 - 1.0) / (2.0 * ap2 - 1.0 + 1.0);
  y.qp = std::pow(central, p + 1.0) * std::pow(s0, ap2) / ap2;
  return y;
}

ShotInternal integrate(double alpha, double p, double central, int want_zeros, double s_max,
                       double max_step, double zero_tol) {
  const Rhs f{alpha, p};
  const double s0 = 1e-8;
  OdeState y = series_start(alpha, p, central, s0);
  double s = s0;
  double h = s0 / 2.0;
  const double rtol = 1e-12;

  ShotInternal out;
  out.s.push_back(s);
  out.v.push_back(y.v);
  out.w.push_back(y.w);

  int steps = 0;
  while (s < s_max && static_cast<int>(out.zeros.size()) < want_zeros) {
    if (++steps > 4000000) throw SolverError("radial shooting: step limit exceeded");
    h = std::min({h, max_step, s_max - s});
    const DpResult res = dp_step(f, s, y, h);
    if (res.err > rtol) {
      h *= std::max(0.2, 0.9 * std::pow(rtol / res.err, 0.2));
      continue;
    }
    const double s_new = s + h;
    const OdeState y_new = res.y5;
    if ((y.v > 0.0 && y_new.v <= 0.0) || (y.v < 0.0 && y_new.v >= 0.0)) {
      // bracketed a zero: bisect with re-integration from the step start
      double lo = s, hi = s_new;
      const OdeState base = y;
      const double base_s = s;
      OdeState ymid{};
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        ymid = rk4_to(f, base_s, base, mid, 32);
        if ((base.v > 0.0) == (ymid.v > 0.0))
          lo = mid;
        else
          hi = mid;
        if (hi - lo <= zero_tol * std::max(1.0, std::abs(mid)) &&
            std::abs(ymid.v) <= 1e-13 * std::max(1.0, std::abs(ymid.w)))
          break;
      }
      const double z = 0.5 * (lo + hi);
      out.zeros.push_back(z);
      out.zero_states.push_back(rk4_to(f, base_s, base, z, 64));
      if (static_cast<int>(out.zeros.size()) >= want_zeros) {
        out.final_state = out.zero_states.back();
        out.final_s = z;
        out.s.push_back(z);
        out.v.push_back(out.final_state.v);
        out.w.push_back(out.final_state.w);
        return out;
      }
    }
    s = s_new;
    y = y_new;
    out.s.push_back(s);
    out.v.push_back(y.v);
    out.w.push_back(y.w);
    if (res.err > 0.0) h *= std::min(5.0, 0.9 * std::pow(rtol / res.err, 0.2));
  }
  if (static_cast<int>(out.zeros.size()) < want_zeros)
    throw SolverError("radial shooting: requested zero not found in the search window");
  out.final_state = y;
  out.final_s = s;
  return out;
}

double hermite_eval(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, const Eigen::VectorXd& ds,
                    double x, bool deriv) {
  const int n = static_cast<int>(xs.size());
  if (x <= xs[0]) {
    return deriv ? ds[0] : ys[0] + ds[0] * (x - xs[0]);
  }
  if (x >= xs[n - 1]) {
    return deriv ? ds[n - 1] : ys[n - 1] + ds[n - 1] * (x - xs[n - 1]);
  }
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (xs[mid] <= x)
      lo = mid;
    else
      hi = mid;
  }
  const double h = xs[hi] - xs[lo];
  const double t = (x - xs[lo]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  if (!deriv)
    return h00 * ys[lo] + h10 * h * ds[lo] + h01 * ys[hi] + h11 * h * ds[hi];
  const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
  return d00 * ys[lo] + d10 * ds[lo] + d01 * ys[hi] + d11 * ds[hi];
}

RadialProfile build_profile(double alpha, double p, const ShotInternal& shot, int zone_count) {
  const double lambda = shot.zeros[zone_count - 1];
  const double d = std::pow(lambda, (2.0 + alpha) / (p - 1.0));
  const OdeState& end = shot.zero_states[zone_count - 1];

  RadialProfile prof;
  prof.p = p;
  prof.alpha = alpha;
  prof.central_value = d;
  prof.interior_zero = (zone_count == 2) ? shot.zeros[0] / lambda : 0.0;
  prof.shoot_residual = d * std::abs(end.v);

  const int m = static_cast<int>(shot.s.size());
  std::vector<double> rs, vs, dvs;
  rs.reserve(m + 2);
  vs.reserve(m + 2);
  dvs.reserve(m + 2);
  rs.push_back(0.0);
  vs.push_back(d);
  dvs.push_back(0.0);
  for (int k = 0; k < m; ++k) {
    const double rr = shot.s[k] / lambda;
    if (rr <= rs.back()) continue;
    if (rr > 1.0) break;
    rs.push_back(rr);
    vs.push_back(d * shot.v[k]);
    dvs.push_back(d * lambda * shot.w[k]);
  }
  if (rs.back() < 1.0) {
    rs.push_back(1.0);
    vs.push_back(d * end.v);
    dvs.push_back(d * lambda * end.w);
  } else {
    vs.back() = d * end.v;
    dvs.back() = d * lambda * end.w;
  }
  prof.r = Eigen::Map<Eigen::VectorXd>(rs.data(), rs.size());
  prof.v = Eigen::Map<Eigen::VectorXd>(vs.data(), vs.size());
  prof.dv = Eigen::Map<Eigen::VectorXd>(dvs.data(), dvs.size());

  // disc integrals by the accumulated quadratures, rescaled exactly
  const double qg_total = end.qg;
  const double qg_inner = (zone_count == 2) ? shot.zero_states[0].qg : end.qg;
  prof.grad_sq_integral = 2.0 * M_PI * d * d * qg_total;
  prof.grad_sq_inner = 2.0 * M_PI * d * d * qg_inner;
  prof.grad_sq_outer = prof.grad_sq_integral - prof.grad_sq_inner;
  prof.weighted_pow_integral =
      2.0 * M_PI * std::pow(d, p + 1.0) * std::pow(lambda, -(alpha + 2.0)) * end.qp;
  return prof;
}

}  // namespace

double RadialProfile::eval(double rr) const { return hermite_eval(r, v, dv, rr, false); }
double RadialProfile::eval_deriv(double rr) const { return hermite_eval(r, v, dv, rr, true); }

double RadialShot::eval(double ss) const { return hermite_eval(s, v, w, ss, false); }
double RadialShot::eval_deriv(double ss) const { return hermite_eval(s, v, w, ss, true); }

RadialShot shoot_radial_raw(double alpha, double p, double central, int want_zeros, double s_max,
                            double max_step, double zero_tol) {
  if (!(p > 1.0)) throw std::invalid_argument("shoot_radial_raw: p must be > 1");
  const ShotInternal shot = integrate(alpha, p, central, want_zeros, s_max, max_step, zero_tol);
  RadialShot out;
  out.s = Eigen::Map<const Eigen::VectorXd>(shot.s.data(), shot.s.size());
  out.v = Eigen::Map<const Eigen::VectorXd>(shot.v.data(), shot.v.size());
  out.w = Eigen::Map<const Eigen::VectorXd>(shot.w.data(), shot.w.size());
  out.zeros = shot.zeros;
  return out;
}

namespace {

RadialProfile solve_nodal(double alpha, double p, double tolerance, int zones) {
  if (!(p > 1.0)) throw std::invalid_argument("radial solver: p must be > 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("radial solver: tolerance must be > 0");
  // pass 1: locate zeros with default stepping
  ShotInternal coarse = integrate(alpha, p, 1.0, zones, 1e6, 1.0, 1e-13);
  const double s_last = coarse.zeros[zones - 1];
  // pass 2: dense output for interpolation, same zero locations
  ShotInternal fine = integrate(alpha, p, 1.0, zones, 1e6, s_last / 1500.0, 1e-13);
  RadialProfile prof = build_profile(alpha, p, fine, zones);
  if (prof.shoot_residual > tolerance)
    throw SolverError("radial solver: shooting residual above tolerance");
  if (zones == 2) {
    const double slope = std::abs(prof.eval_deriv(prof.interior_zero)) / prof.central_value;
    if (slope <= 1e-8) throw SolverError("radial solver: vanishing slope at the interior zero");
  }
  return prof;
}

}  // namespace

RadialProfile lane_emden_nodal(double p, double tolerance) {
  return solve_nodal(0.0, p, tolerance, 2);
}

RadialProfile radial_nodal(double alpha, double p, double tolerance) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("radial_nodal: alpha must be >= 0");
  return solve_nodal(alpha, p, tolerance, 2);
}

RadialProfile radial_ground(double alpha, double p, double tolerance) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("radial_ground: alpha must be >= 0");
  return solve_nodal(alpha, p, tolerance, 1);
}

RadialProfile radial_two_zone(double alpha, double p, double tolerance) {
  const RadialProfile le = lane_emden_nodal(p, tolerance);
  if (alpha == 0.0) return le;
  return henon_from_lane_emden(le, alpha);
}

RadialProfile henon_from_lane_emden(const RadialProfile& le, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("henon_from_lane_emden: alpha must be >= 0");
  const double p = le.p;
  const double half = 0.5 * (2.0 + alpha);
  const double scale = std::pow(2.0 / (2.0 + alpha), 2.0 / (p - 1.0));
  // u(r) = v(r^half) / scale with v the Lane-Emden profile
  RadialProfile out;
  out.p = p;
  out.alpha = alpha;
  const int m = static_cast<int>(le.r.size());
  out.r.resize(m);
  out.v.resize(m);
  out.dv.resize(m);
  for (int k = 0; k < m; ++k) {
    const double t = le.r[k];
    const double rr = std::pow(t, 1.0 / half);
    out.r[k] = rr;
    out.v[k] = le.v[k] / scale;
    out.dv[k] = (k == 0) ? 0.0 : le.dv[k] / scale * half * std::pow(rr, half - 1.0);
  }
  out.r[0] = 0.0;
  out.central_value = le.central_value / scale;
  out.interior_zero = std::pow(le.interior_zero, 1.0 / half);
  out.shoot_residual = le.shoot_residual / scale;

  // integrals by composite Simpson on the mapped profile (independent of the
  // transformation identity for the gradient integral)
  const int panels = 40000;
  const double h = 1.0 / panels;
  CompensatedSum sg, sgi, sp;
  for (int k = 0; k <= panels; ++k) {
    const double rr = k * h;
    const double wgt = (k == 0 || k == panels) ? 1.0 : ((k % 2 == 1) ? 4.0 : 2.0);
    const double du = out.eval_deriv(rr);
    const double uu = out.eval(rr);
    sg.add(wgt * du * du * rr);
    if (rr <= out.interior_zero) sgi.add(wgt * du * du * rr);
    sp.add(wgt * std::pow(rr, alpha) * std::pow(std::abs(uu), p + 1.0) * rr);
  }
  out.grad_sq_integral = 2.0 * M_PI * sg.value() * h / 3.0;
  out.grad_sq_inner = 2.0 * M_PI * sgi.value() * h / 3.0;
  out.grad_sq_outer = out.grad_sq_integral - out.grad_sq_inner;
  out.weighted_pow_integral = 2.0 * M_PI * sp.value() * h / 3.0;
  return out;
}

std::vector<RadialEnergyRow> radial_energy_table(double alpha, const std::vector<double>& p_list) {
  const double gamma = AsymptoticConstants::get().gamma;
  const double target = 2.0 * (2.0 + alpha) * gamma * M_PI * M_E;
  std::vector<RadialEnergyRow> rows;
  rows.reserve(p_list.size());
  for (double p : p_list) {
    RadialEnergyRow row;
    row.p = p;
    row.target = target;
    try {
      const RadialProfile le = lane_emden_nodal(p, 1e-10);
      const RadialProfile prof = (alpha == 0.0) ? le : henon_from_lane_emden(le, alpha);
      const double e = 0.5 * prof.grad_sq_integral - prof.weighted_pow_integral / (p + 1.0);
      row.p_energy = p * e;
      row.gap = std::abs(row.p_energy - target);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

Field interpolate_radial(const SectorMesh& mesh, const RadialProfile& profile) {
  Field f = zero_field(mesh);
  f.pole = profile.central_value;
  for (int i = 0; i < mesh.n_r; ++i) {
    const double val = (i + 1 == mesh.n_r) ? 0.0 : profile.eval(mesh.r[i]);
    for (int j = 0; j < mesh.n_theta; ++j) f.ring(i, j) = val;
  }
  return f;
}

}  // namespace henon
