#include "henon/nehari.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>

namespace henon {

void SolveConfig::validate() const {
  if (!(residual_tolerance > 0.0) || !(nehari_tolerance > 0.0))
    throw ConfigError("SolveConfig: tolerances must be positive");
  if (max_iterations < 1) throw ConfigError("SolveConfig: max_iterations must be >= 1");
  if (restarts < 1) throw ConfigError("SolveConfig: restarts must be >= 1");
  if (!(step_size > 0.0) || !(perturbation_amplitude >= 0.0))
    throw ConfigError("SolveConfig: step/amplitude must be positive");
  if (init_kind != "auto" && init_kind != "radial-perturbed" && init_kind != "two-bump" &&
      init_kind != "annular-split")
    throw ConfigError("SolveConfig: unknown init kind '" + init_kind + "'");
}

Field nehari_scale(const SectorMesh& mesh, const Field& f, double p) {
  if (max_abs(f) == 0.0) throw std::invalid_argument("nehari_scale: zero field");
  const double e = dirichlet_energy(mesh, f);
  const double lw = log_weighted_integral(mesh, f, p + 1.0);
  if (!(e > 0.0) || lw == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("nehari_scale: degenerate field (zero energy or weighted integral)");
  const double log_sigma = (std::log(e) - lw) / (p - 1.0);
  const double sigma = std::exp(log_sigma);
  Field out;
  out.ring = sigma * f.ring;
  out.pole = sigma * f.pole;
  return out;
}

double nehari_defect(const SectorMesh& mesh, const Field& f, double p) {
  const double e = dirichlet_energy(mesh, f);
  const double q = weighted_integral(mesh, f, p + 1.0);
  if (e == 0.0) return 0.0;
  return std::abs(e - q) / e;
}

Field nodal_nehari_project(const SectorMesh& mesh, const Field& f, double p) {
  if (!changes_sign(f))
    throw std::invalid_argument("nodal_nehari_project: field does not change sign");
  const Field up = nehari_scale(mesh, positive_part(f), p);
  const Field um = nehari_scale(mesh, negative_part(f), p);
  Field out;
  out.ring = up.ring + um.ring;
  out.pole = up.pole + um.pole;
  return out;
}

namespace {

double wrapped_dist(double x, double period) {
  double d = std::fmod(std::abs(x), period);
  return std::min(d, period - d);
}

}  // namespace

Field initial_guess(const std::string& kind, const SectorMesh& mesh, const ProblemParams& params,
                    unsigned long seed, double amplitude, const RadialProfile* radial) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double period = 2.0 * M_PI / params.n;
  Field f = zero_field(mesh);

  RadialProfile local;
  auto need_radial = [&]() -> const RadialProfile& {
    if (radial) return *radial;
    local = radial_two_zone(params.alpha, params.p, 1e-10);
    return local;
  };

  if (kind == "radial-perturbed") {
    const RadialProfile& prof = need_radial();
    const double phase = unit(rng) * period;
    f.pole = prof.central_value;
    for (int i = 0; i + 1 < mesh.n_r; ++i) {
      const double base = prof.eval(mesh.r[i]);
      const double env = amplitude * mesh.r[i];
      for (int j = 0; j < mesh.n_theta; ++j) {
        const double th = j * mesh.dtheta;
        f.ring(i, j) = base * (1.0 + env * std::cos(params.n * (th + phase)));
      }
    }
    return f;
  }

  if (kind == "two-bump") {
    const double phase = unit(rng) * period;
    const double c1 = 0.27 * period, c2 = 0.73 * period;
    const double sb = (0.12 + 0.04 * unit(rng)) * period;
    const double a1 = 1.0 + 0.2 * (unit(rng) - 0.5);
    const double a2 = 1.0 + 0.2 * (unit(rng) - 0.5);
    for (int i = 0; i + 1 < mesh.n_r; ++i) {
      const double rr = mesh.r[i];
      const double env = 4.0 * std::pow(rr, 1.5) * (1.0 - rr);
      for (int j = 0; j < mesh.n_theta; ++j) {
        const double th = std::fmod(j * mesh.dtheta + phase, period);
        const double d1 = wrapped_dist(th - c1, period);
        const double d2 = wrapped_dist(th - c2, period);
        f.ring(i, j) = env * (a1 * std::exp(-0.5 * d1 * d1 / (sb * sb)) -
                              a2 * std::exp(-0.5 * d2 * d2 / (sb * sb)));
      }
    }
    return f;
  }

  if (kind == "annular-split") {
    double r0 = 0.55;
    if (radial && radial->interior_zero > 0.0) r0 = radial->interior_zero;
    r0 *= 1.0 + 0.1 * (unit(rng) - 0.5);
    const double phase = unit(rng) * period;
    const double mod = amplitude * (1.0 + 0.5 * unit(rng));
    f.pole = 3.0 * r0;
    for (int i = 0; i + 1 < mesh.n_r; ++i) {
      const double rr = mesh.r[i];
      const double base = 3.0 * (r0 - rr) * (1.0 - rr);
      const double wob = mod * rr * (1.0 - rr);
      for (int j = 0; j < mesh.n_theta; ++j) {
        const double th = j * mesh.dtheta;
        f.ring(i, j) = base + wob * std::cos(params.n * (th + phase));
      }
    }
    return f;
  }

  throw ConfigError("initial_guess: unknown kind '" + kind + "'");
}

namespace {

struct WorkSpace {
  const SectorMesh& mesh;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd w;    // mass weights
  Eigen::VectorXd rho;  // alpha weights
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> poisson;

  explicit WorkSpace(const SectorMesh& m)
      : mesh(m), A(stiffness_matrix(m)), w(mass_weights(m)), rho(alpha_weights(m)) {
    poisson.compute(A);
    if (poisson.info() != Eigen::Success)
      throw SolverError("minimize: stiffness factorization failed");
  }

  Eigen::VectorXd nonlinear(const Eigen::VectorXd& x, double p) const {
    Eigen::VectorXd f(x.size());
    for (int i = 0; i < x.size(); ++i)
      f[i] = rho[i] * std::pow(std::abs(x[i]), p - 1.0) * x[i];
    return f;
  }

  // residual vector A x - W f(x) and the normalized residual norm
  double residual_norm(const Eigen::VectorXd& x, double p, Eigen::VectorXd& res) const {
    res = A * x - w.cwiseProduct(nonlinear(x, p));
    double num = 0.0;
    for (int i = 0; i < x.size(); ++i) num += res[i] * res[i] / w[i];
    num *= mesh.n;
    const Eigen::VectorXd ax = A * x;
    const double h1 = mesh.n * (x.dot(ax) + x.dot(w.cwiseProduct(x)));
    return (h1 > 0.0) ? std::sqrt(num / h1) : std::sqrt(num);
  }
};

struct AttemptResult {
  Field field;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool sign_change = false;
  std::vector<double> trace;
};

AttemptResult run_attempt(const WorkSpace& ws, const SolveConfig& cfg, const ProblemParams& params,
                          Field u0) {
  const SectorMesh& mesh = ws.mesh;
  const double p = params.p;
  AttemptResult out;

  Field u = nodal_nehari_project(mesh, u0, p);
  double e_cur = energy(mesh, u, p);
  out.trace.push_back(e_cur);

  Eigen::VectorXd x = to_dofs(mesh, u);
  Eigen::VectorXd res;
  double step = cfg.step_size;
  int it = 0;
  double rnorm = ws.residual_norm(x, p, res);

  // projected H1 gradient descent with Armijo backtracking
  for (; it < cfg.max_iterations && rnorm > cfg.newton_switch; ++it) {
    const Eigen::VectorXd g = ws.poisson.solve(res);
    const double slope = mesh.n * g.dot(ws.A * g);
    bool accepted = false;
    double s = step;
    for (int half = 0; half < 45; ++half) {
      const Eigen::VectorXd xt = x - s * g;
      Field ft = from_dofs(mesh, xt);
      if (!changes_sign(ft)) {
        s *= 0.5;
        continue;
      }
      Field proj;
      try {
        proj = nodal_nehari_project(mesh, ft, p);
      } catch (const std::exception&) {
        s *= 0.5;
        continue;
      }
      const double e_new = energy(mesh, proj, p);
      if (e_new <= e_cur - 1e-4 * s * slope) {
        u = proj;
        x = to_dofs(mesh, u);
        e_cur = e_new;
        out.trace.push_back(e_cur);
        step = std::min(s * 1.6, 64.0);
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;  // stagnation at the descent scale, hand to Newton
    rnorm = ws.residual_norm(x, p, res);
  }

  // Newton polish on the discrete PDE
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int nit = 0; nit < cfg.newton_max && rnorm > cfg.residual_tolerance; ++nit, ++it) {
    Eigen::SparseMatrix<double> J = ws.A;
    for (int i = 0; i < x.size(); ++i)
      J.coeffRef(i, i) -= ws.w[i] * p * ws.rho[i] * std::pow(std::abs(x[i]), p - 1.0);
    lu.compute(J);
    if (lu.info() != Eigen::Success) break;
    const Eigen::VectorXd dx = lu.solve(-res);
    bool improved = false;
    double s = 1.0;
    for (int half = 0; half < 12; ++half) {
      const Eigen::VectorXd xt = x + s * dx;
      Eigen::VectorXd res_t;
      const double rt = ws.residual_norm(xt, p, res_t);
      Field ft = from_dofs(mesh, xt);
      if (rt < rnorm && changes_sign(ft)) {
        x = xt;
        res = res_t;
        rnorm = rt;
        improved = true;
        break;
      }
      s *= 0.5;
    }
    if (!improved) break;
  }

  u = from_dofs(mesh, x);
  out.field = u;
  out.energy = energy(mesh, u, p);
  out.residual = rnorm;
  out.iterations = it;
  out.sign_change = changes_sign(u);
  out.converged = out.sign_change && rnorm <= cfg.residual_tolerance;
  return out;
}

double pairing_defect(const SectorMesh& mesh, const Field& u, const Field& part, double p) {
  const double pair = dirichlet_pairing(mesh, u, part);
  const double pot = weighted_integral(mesh, part, p + 1.0);
  const double scale = std::max(std::abs(pair), std::abs(pot));
  if (scale == 0.0) return 0.0;
  return std::abs(pair - pot) / scale;
}

}  // namespace

Solution minimize(const SolveConfig& config, const ProblemParams& params, const SectorMesh& mesh) {
  config.validate();
  if (mesh.n != params.n) throw ConfigError("minimize: mesh symmetry order differs from params.n");
  if (mesh.alpha != params.alpha) throw ConfigError("minimize: mesh alpha differs from params.alpha");

  WorkSpace ws(mesh);
  const RadialProfile radial = radial_two_zone(params.alpha, params.p, 1e-10);

  static const char* kinds[] = {"radial-perturbed", "two-bump", "annular-split"};
  Solution best;
  best.params = params;
  best.converged = false;
  bool have_best = false;

  for (int k = 0; k < config.restarts; ++k) {
    const std::string kind =
        (config.init_kind == "auto") ? kinds[k % 3] : config.init_kind;
    const unsigned long seed = config.random_seed + 1000003UL * static_cast<unsigned long>(k);
    Field init;
    try {
      init = initial_guess(kind, mesh, params, seed, config.perturbation_amplitude, &radial);
      AttemptResult att = run_attempt(ws, config, params, init);
      if (att.converged) best.basin_energies.push_back(att.energy);
      const bool better = att.converged && (!have_best || !best.converged ||
                                            att.energy < best.energy - 0.0);
      const bool fallback = !have_best || (!best.converged && att.residual < best.residual);
      if (better || fallback) {
        best.field = att.field;
        best.energy = att.energy;
        best.residual = att.residual;
        best.iterations_used = att.iterations;
        best.init_kind = kind;
        best.seed = seed;
        best.converged = att.converged;
        best.sign_change = att.sign_change;
        best.energy_trace = att.trace;
        have_best = true;
      }
    } catch (const std::exception&) {
      continue;  // failed attempt, next restart
    }
  }
  if (!have_best) throw SolverError("minimize: every restart failed");

  best.dirichlet = dirichlet_energy(mesh, best.field);
  best.scaled_energy = params.p * best.energy;
  best.nehari_defect_plus = pairing_defect(mesh, best.field, positive_part(best.field), params.p);
  best.nehari_defect_minus = pairing_defect(mesh, best.field, negative_part(best.field), params.p);
  if (best.basin_energies.size() >= 2) {
    const double lo = *std::min_element(best.basin_energies.begin(), best.basin_energies.end());
    const double hi = *std::max_element(best.basin_energies.begin(), best.basin_energies.end());
    best.multi_basin = (hi - lo) > 1e-4 * std::abs(lo);
  }
  return best;
}

}  // namespace henon
