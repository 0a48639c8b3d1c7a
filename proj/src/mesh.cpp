#include "henon/mesh.hpp"

#include <cmath>
#include <vector>

namespace henon {

SectorMesh build_mesh(int n, int n_r, int n_theta, Grading grading, double alpha) {
  if (n < 1) throw ConfigError("build_mesh: n must be >= 1");
  if (n_r < 16) throw ConfigError("build_mesh: N_r below minimum resolution 16");
  if (n_theta < 8) throw ConfigError("build_mesh: N_theta below minimum resolution 8");
  if (n_theta % 2 != 0) throw ConfigError("build_mesh: N_theta must be even (bisector on grid)");
  if (!(alpha >= 0.0)) throw ConfigError("build_mesh: alpha must be >= 0");

  SectorMesh m;
  m.n = n;
  m.n_r = n_r;
  m.n_theta = n_theta;
  m.alpha = alpha;
  m.grading = grading;
  m.dtheta = 2.0 * M_PI / (static_cast<double>(n) * n_theta);

  m.r.resize(n_r);
  for (int i = 0; i < n_r; ++i) {
    const double t = static_cast<double>(i + 1) / n_r;
    m.r[i] = (grading == Grading::Uniform) ? t : std::sin(0.5 * M_PI * t);
  }
  m.r[n_r - 1] = 1.0;

  m.r_face.resize(n_r);
  m.r_face[0] = 0.5 * m.r[0];
  for (int i = 1; i < n_r; ++i) m.r_face[i] = 0.5 * (m.r[i - 1] + m.r[i]);

  const double ap2 = alpha + 2.0;
  m.cell_a.resize(n_r);
  m.cell_m.resize(n_r);
  for (int i = 0; i < n_r; ++i) {
    const double lo = m.r_face[i];
    const double hi = (i + 1 < n_r) ? m.r_face[i + 1] : 1.0;
    m.cell_a[i] = 0.5 * (hi * hi - lo * lo);
    m.cell_m[i] = (std::pow(hi, ap2) - std::pow(lo, ap2)) / ap2;
  }
  m.pole_a = 0.5 * m.r_face[0] * m.r_face[0];
  m.pole_m = std::pow(m.r_face[0], ap2) / ap2;

  m.cond_rad.resize(n_r - 1);
  for (int i = 0; i + 1 < n_r; ++i)
    m.cond_rad[i] = m.dtheta * m.r_face[i + 1] / (m.r[i + 1] - m.r[i]);
  m.cond_pole = m.dtheta * m.r_face[0] / m.r[0];  // = dtheta/2

  m.cond_ang.resize(n_r - 1);
  for (int i = 0; i + 1 < n_r; ++i) {
    const double hi = m.r_face[i + 1];
    m.cond_ang[i] = std::log(hi / m.r_face[i]) / m.dtheta;
  }
  return m;
}

Field zero_field(const SectorMesh& mesh) {
  Field f;
  f.ring = Eigen::ArrayXXd::Zero(mesh.n_r, mesh.n_theta);
  f.pole = 0.0;
  return f;
}

bool compatible(const SectorMesh& mesh, const Field& f) {
  return f.ring.rows() == mesh.n_r && f.ring.cols() == mesh.n_theta;
}

namespace {
void require_compatible(const SectorMesh& mesh, const Field& f, const char* where) {
  if (!compatible(mesh, f)) throw std::invalid_argument(std::string(where) + ": field/mesh mismatch");
}
}  // namespace

double max_abs(const Field& f) {
  double m = std::abs(f.pole);
  if (f.ring.size() > 0) m = std::max(m, f.ring.abs().maxCoeff());
  return m;
}

bool changes_sign(const Field& f) {
  bool pos = f.pole > 0.0, neg = f.pole < 0.0;
  const auto& a = f.ring;
  for (Eigen::Index j = 0; j < a.cols() && !(pos && neg); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      pos = pos || a(i, j) > 0.0;
      neg = neg || a(i, j) < 0.0;
    }
  return pos && neg;
}

Field positive_part(const Field& f) {
  Field out;
  out.ring = f.ring.max(0.0);
  out.pole = std::max(f.pole, 0.0);
  return out;
}

Field negative_part(const Field& f) {
  Field out;
  out.ring = f.ring.min(0.0);
  out.pole = std::min(f.pole, 0.0);
  return out;
}

double dirichlet_energy(const SectorMesh& mesh, const Field& f) {
  require_compatible(mesh, f, "dirichlet_energy");
  const auto& u = f.ring;
  const int nt = mesh.n_theta;
  CompensatedSum s;
  for (int j = 0; j < nt; ++j) {
    const double d = u(0, j) - f.pole;
    s.add(mesh.cond_pole * d * d);
  }
  for (int i = 0; i + 1 < mesh.n_r; ++i) {
    const double c = mesh.cond_rad[i];
    for (int j = 0; j < nt; ++j) {
      const double d = u(i + 1, j) - u(i, j);
      s.add(c * d * d);
    }
  }
  for (int i = 0; i + 1 < mesh.n_r; ++i) {
    const double c = mesh.cond_ang[i];
    for (int j = 0; j < nt; ++j) {
      const double d = u(i, (j + 1) % nt) - u(i, j);
      s.add(c * d * d);
    }
  }
  return static_cast<double>(mesh.n) * s.value();
}

double dirichlet_pairing(const SectorMesh& mesh, const Field& a, const Field& b) {
  require_compatible(mesh, a, "dirichlet_pairing");
  require_compatible(mesh, b, "dirichlet_pairing");
  const auto& u = a.ring;
  const auto& v = b.ring;
  const int nt = mesh.n_theta;
  CompensatedSum s;
  for (int j = 0; j < nt; ++j)
    s.add(mesh.cond_pole * (u(0, j) - a.pole) * (v(0, j) - b.pole));
  for (int i = 0; i + 1 < mesh.n_r; ++i) {
    const double c = mesh.cond_rad[i];
    for (int j = 0; j < nt; ++j)
      s.add(c * (u(i + 1, j) - u(i, j)) * (v(i + 1, j) - v(i, j)));
  }
  for (int i = 0; i + 1 < mesh.n_r; ++i) {
    const double c = mesh.cond_ang[i];
    for (int j = 0; j < nt; ++j)
      s.add(c * (u(i, (j + 1) % nt) - u(i, j)) * (v(i, (j + 1) % nt) - v(i, j)));
  }
  return static_cast<double>(mesh.n) * s.value();
}

double log_weighted_integral(const SectorMesh& mesh, const Field& f, double q) {
  require_compatible(mesh, f, "weighted_integral");
  if (!(q >= 1.0)) throw std::invalid_argument("weighted_integral: q must be >= 1");
  const double amp = max_abs(f);
  if (amp == 0.0) return -std::numeric_limits<double>::infinity();
  const double log_amp = std::log(amp);
  CompensatedSum s;
  if (f.pole != 0.0)
    s.add(static_cast<double>(mesh.n_theta) * mesh.pole_m *
          std::exp(q * (std::log(std::abs(f.pole)) - log_amp)));
  for (int i = 0; i < mesh.n_r; ++i) {
    const double m = mesh.cell_m[i];
    for (int j = 0; j < mesh.n_theta; ++j) {
      const double a = std::abs(f.ring(i, j));
      if (a != 0.0) s.add(m * std::exp(q * (std::log(a) - log_amp)));
    }
  }
  const double body = s.value();
  if (!(body > 0.0)) return -std::numeric_limits<double>::infinity();
  return q * log_amp + std::log(body * mesh.n * mesh.dtheta);
}

double weighted_integral(const SectorMesh& mesh, const Field& f, double q) {
  const double lw = log_weighted_integral(mesh, f, q);
  if (lw == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(lw);
}

double l2_sq(const SectorMesh& mesh, const Field& f) {
  require_compatible(mesh, f, "l2_sq");
  CompensatedSum s;
  s.add(static_cast<double>(mesh.n_theta) * mesh.pole_a * f.pole * f.pole);
  for (int i = 0; i < mesh.n_r; ++i) {
    const double a = mesh.cell_a[i];
    for (int j = 0; j < mesh.n_theta; ++j) {
      const double v = f.ring(i, j);
      s.add(a * v * v);
    }
  }
  return s.value() * mesh.n * mesh.dtheta;
}

double l2_inner(const SectorMesh& mesh, const Field& f, const Field& g) {
  require_compatible(mesh, f, "l2_inner");
  require_compatible(mesh, g, "l2_inner");
  CompensatedSum s;
  s.add(static_cast<double>(mesh.n_theta) * mesh.pole_a * f.pole * g.pole);
  for (int i = 0; i < mesh.n_r; ++i) {
    const double a = mesh.cell_a[i];
    for (int j = 0; j < mesh.n_theta; ++j) s.add(a * f.ring(i, j) * g.ring(i, j));
  }
  return s.value() * mesh.n * mesh.dtheta;
}

double energy(const SectorMesh& mesh, const Field& f, double p) {
  const double grad = dirichlet_energy(mesh, f);
  const double pot = weighted_integral(mesh, f, p + 1.0);
  return 0.5 * grad - pot / (p + 1.0);
}

Field apply_neg_laplacian(const SectorMesh& mesh, const Field& f) {
  require_compatible(mesh, f, "apply_neg_laplacian");
  const auto& u = f.ring;
  const int nt = mesh.n_theta;
  Field out = zero_field(mesh);

  // pole cell: sector-reduced flux balance
  {
    CompensatedSum flux;
    for (int j = 0; j < nt; ++j) flux.add(mesh.cond_pole * (f.pole - u(0, j)));
    out.pole = flux.value() / (mesh.pole_a * mesh.dtheta * nt);
  }
  for (int i = 0; i + 1 < mesh.n_r; ++i) {
    const double inv_w = 1.0 / (mesh.cell_a[i] * mesh.dtheta);
    const double c_in = (i == 0) ? mesh.cond_pole : mesh.cond_rad[i - 1];
    const double c_out = mesh.cond_rad[i];
    const double c_ang = mesh.cond_ang[i];
    for (int j = 0; j < nt; ++j) {
      const double inner = (i == 0) ? f.pole : u(i - 1, j);
      double v = c_in * (u(i, j) - inner) + c_out * (u(i, j) - u(i + 1, j));
      v += c_ang * (2.0 * u(i, j) - u(i, (j + 1) % nt) - u(i, (j + nt - 1) % nt));
      out.ring(i, j) = v * inv_w;
    }
  }
  // last row is Dirichlet data, no equation there
  return out;
}

double pde_residual(const SectorMesh& mesh, const Field& f, double p) {
  require_compatible(mesh, f, "pde_residual");
  const Field lap = apply_neg_laplacian(mesh, f);
  CompensatedSum s;
  {
    const double rho = mesh.rho_pole();
    const double fv = rho * std::pow(std::abs(f.pole), p - 1.0) * f.pole;
    const double res = lap.pole - fv;
    s.add(static_cast<double>(mesh.n_theta) * mesh.pole_a * res * res);
  }
  for (int i = 0; i + 1 < mesh.n_r; ++i) {
    const double rho = mesh.rho(i);
    const double a = mesh.cell_a[i];
    for (int j = 0; j < mesh.n_theta; ++j) {
      const double v = f.ring(i, j);
      const double res = lap.ring(i, j) - rho * std::pow(std::abs(v), p - 1.0) * v;
      s.add(a * res * res);
    }
  }
  const double res_l2 = std::sqrt(s.value() * mesh.n * mesh.dtheta);
  const double h1 = std::sqrt(dirichlet_energy(mesh, f) + l2_sq(mesh, f));
  if (h1 == 0.0) return res_l2;
  return res_l2 / h1;
}

Field unfold_full_disc(const SectorMesh& mesh, const Field& f, SectorMesh& full_mesh_out) {
  require_compatible(mesh, f, "unfold_full_disc");
  full_mesh_out = build_mesh(1, mesh.n_r, mesh.n * mesh.n_theta, mesh.grading, mesh.alpha);
  Field out;
  out.pole = f.pole;
  out.ring.resize(mesh.n_r, mesh.n * mesh.n_theta);
  for (int k = 0; k < mesh.n; ++k)
    out.ring.middleCols(k * mesh.n_theta, mesh.n_theta) = f.ring;
  return out;
}

Field angular_shift(const SectorMesh& mesh, const Field& f, int k_cells) {
  require_compatible(mesh, f, "angular_shift");
  const int nt = mesh.n_theta;
  int k = ((k_cells % nt) + nt) % nt;
  Field out;
  out.pole = f.pole;
  out.ring.resize(f.ring.rows(), f.ring.cols());
  for (int j = 0; j < nt; ++j) out.ring.col(j) = f.ring.col((j - k + nt) % nt);
  return out;
}

Field reflect_bisector(const SectorMesh& mesh, const Field& f) {
  require_compatible(mesh, f, "reflect_bisector");
  const int nt = mesh.n_theta;
  Field out;
  out.pole = f.pole;
  out.ring.resize(f.ring.rows(), f.ring.cols());
  for (int j = 0; j < nt; ++j) out.ring.col(j) = f.ring.col((nt - j) % nt);
  return out;
}

Eigen::SparseMatrix<double> stiffness_matrix(const SectorMesh& mesh) {
  const int nt = mesh.n_theta;
  const int N = mesh.dof_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(N) * 6);

  auto add_edge = [&](int a, int b, double c) {
    trip.emplace_back(a, a, c);
    trip.emplace_back(b, b, c);
    trip.emplace_back(a, b, -c);
    trip.emplace_back(b, a, -c);
  };
  // pole edges
  for (int j = 0; j < nt; ++j) add_edge(0, mesh.dof(0, j), mesh.cond_pole);
  // radial edges between interior rings
  for (int i = 0; i + 1 < mesh.n_r - 1; ++i)
    for (int j = 0; j < nt; ++j) add_edge(mesh.dof(i, j), mesh.dof(i + 1, j), mesh.cond_rad[i]);
  // radial edges to the Dirichlet ring: diagonal contribution only
  {
    const double c = mesh.cond_rad[mesh.n_r - 2];
    for (int j = 0; j < nt; ++j) {
      const int d = mesh.dof(mesh.n_r - 2, j);
      trip.emplace_back(d, d, c);
    }
  }
  // angular edges
  for (int i = 0; i + 1 < mesh.n_r; ++i)
    for (int j = 0; j < nt; ++j)
      add_edge(mesh.dof(i, j), mesh.dof(i, (j + 1) % nt), mesh.cond_ang[i]);

  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd mass_weights(const SectorMesh& mesh) {
  Eigen::VectorXd w(mesh.dof_count());
  w[0] = mesh.pole_a * mesh.dtheta * mesh.n_theta;
  for (int i = 0; i + 1 < mesh.n_r; ++i)
    for (int j = 0; j < mesh.n_theta; ++j) w[mesh.dof(i, j)] = mesh.cell_a[i] * mesh.dtheta;
  return w;
}

Eigen::VectorXd alpha_weights(const SectorMesh& mesh) {
  Eigen::VectorXd w(mesh.dof_count());
  w[0] = mesh.rho_pole();
  for (int i = 0; i + 1 < mesh.n_r; ++i)
    for (int j = 0; j < mesh.n_theta; ++j) w[mesh.dof(i, j)] = mesh.rho(i);
  return w;
}

Eigen::VectorXd to_dofs(const SectorMesh& mesh, const Field& f) {
  require_compatible(mesh, f, "to_dofs");
  Eigen::VectorXd x(mesh.dof_count());
  x[0] = f.pole;
  for (int i = 0; i + 1 < mesh.n_r; ++i)
    for (int j = 0; j < mesh.n_theta; ++j) x[mesh.dof(i, j)] = f.ring(i, j);
  return x;
}

Field from_dofs(const SectorMesh& mesh, const Eigen::VectorXd& x) {
  if (x.size() != mesh.dof_count()) throw std::invalid_argument("from_dofs: size mismatch");
  Field f = zero_field(mesh);
  f.pole = x[0];
  for (int i = 0; i + 1 < mesh.n_r; ++i)
    for (int j = 0; j < mesh.n_theta; ++j) f.ring(i, j) = x[mesh.dof(i, j)];
  return f;
}

}  // namespace henon
