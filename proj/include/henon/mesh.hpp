#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>

namespace henon {

// Compensated (Neumaier) accumulator. Integral reductions use it with a fixed
// traversal order so that permuting the summands (rotated fields, unfolded
// copies) reproduces the same double.
struct CompensatedSum {
  double hi = 0.0;
  double lo = 0.0;
  inline void add(double x) {
    const double s = hi + x;
    if (std::abs(hi) >= std::abs(x))
      lo += (hi - s) + x;
    else
      lo += (x - s) + hi;
    hi = s;
  }
  inline double value() const { return hi + lo; }
};

enum class Grading { Uniform, Boundary };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite-volume discretization of the fundamental sector of opening 2*pi/n.
// Rings are indexed 0..n_r-1 at radii r[i], the last ring sits on r = 1 and
// carries Dirichlet data. The pole is a single shared degree of freedom.
// Cell masses telescope so that the disc area is reproduced exactly; the
// |x|^alpha quadrature factor per cell is the exact cell average of r^alpha,
// which keeps second order despite the weight vanishing at the pole.
struct SectorMesh {
  int n = 1;          // symmetry order
  int n_r = 0;        // number of rings (last one on r = 1)
  int n_theta = 0;    // angular cells per sector
  double alpha = 0.0; // quadrature weight exponent
  Grading grading = Grading::Uniform;
  double dtheta = 0.0; // 2*pi/(n*n_theta)

  Eigen::VectorXd r;       // ring radii, size n_r, strictly increasing, r[n_r-1] = 1
  Eigen::VectorXd r_face;  // face radii, size n_r; face i between ring i-1 and ring i, face 0 = r[0]/2
  Eigen::VectorXd cell_a;  // per-angle cell masses (r dr part), size n_r
  Eigen::VectorXd cell_m;  // per-angle cell moments of r^alpha, size n_r
  double pole_a = 0.0;     // per-angle pole cell mass (sector share = pole_a*dtheta*n_theta)
  double pole_m = 0.0;
  Eigen::VectorXd cond_rad;  // radial edge conductance ring i -> i+1, size n_r-1
  double cond_pole = 0.0;    // pole -> ring 0 conductance per angular index
  Eigen::VectorXd cond_ang;  // angular edge conductance within ring i, size n_r-1 (interior rings)

  int interior_rings() const { return n_r - 1; }
  int dof_count() const { return 1 + (n_r - 1) * n_theta; }
  // dof 0 = pole, then ring-major over interior rings
  int dof(int i, int j) const { return 1 + i * n_theta + j; }
  double rho(int i) const { return cell_m[i] / cell_a[i]; }  // cell-averaged r^alpha
  double rho_pole() const { return pole_m / pole_a; }
};

SectorMesh build_mesh(int n, int n_r, int n_theta, Grading grading, double alpha);

// Grid function on the sector. ring is n_r x n_theta with row i the values on
// ring i; the last row is the Dirichlet ring and is held at zero by every
// solver path (tests may relax it for quadrature checks). Periodic in the
// angular index with period n_theta.
struct Field {
  Eigen::ArrayXXd ring;
  double pole = 0.0;
};

Field zero_field(const SectorMesh& mesh);
bool compatible(const SectorMesh& mesh, const Field& f);
double max_abs(const Field& f);
bool changes_sign(const Field& f);
Field positive_part(const Field& f);
Field negative_part(const Field& f);  // min(u,0), kept negative

// integral over the full disc of |grad u|^2, as the edge form of the discrete
// operator (n times the sector edge sum). Exact additivity and the discrete
// Nehari algebra hinge on using this form everywhere.
double dirichlet_energy(const SectorMesh& mesh, const Field& f);
// integral of grad u . grad v in the same edge form
double dirichlet_pairing(const SectorMesh& mesh, const Field& u, const Field& v);

// integral over the full disc of |x|^alpha |u|^q; log-domain accumulation
// relative to max|u| so large amplitudes at large q stay finite.
double weighted_integral(const SectorMesh& mesh, const Field& f, double q);
double log_weighted_integral(const SectorMesh& mesh, const Field& f, double q);

// plain L2: integral of u^2 (no weight), and the matching inner product
double l2_sq(const SectorMesh& mesh, const Field& f);
double l2_inner(const SectorMesh& mesh, const Field& f, const Field& g);

double energy(const SectorMesh& mesh, const Field& f, double p);

// nodal application of -Delta (uses the stored Dirichlet row as boundary data)
Field apply_neg_laplacian(const SectorMesh& mesh, const Field& f);

// L2 norm of -Delta u - |x|^alpha |u|^{p-1} u, normalized by the H1 norm of u
double pde_residual(const SectorMesh& mesh, const Field& f, double p);

// replicate the sector n times by rotation; bitwise copies
Field unfold_full_disc(const SectorMesh& mesh, const Field& f, SectorMesh& full_mesh_out);

// exact grid-index permutations
Field angular_shift(const SectorMesh& mesh, const Field& f, int k_cells);
Field reflect_bisector(const SectorMesh& mesh, const Field& f);

// weighted stiffness matrix A (SPD, symmetric w.r.t. the plain dot product on
// dofs); <A x, x> equals the sector edge sum of the Dirichlet form
Eigen::SparseMatrix<double> stiffness_matrix(const SectorMesh& mesh);
Eigen::VectorXd mass_weights(const SectorMesh& mesh);   // per-dof sector cell masses
Eigen::VectorXd alpha_weights(const SectorMesh& mesh);  // per-dof cell-averaged r^alpha

Eigen::VectorXd to_dofs(const SectorMesh& mesh, const Field& f);
Field from_dofs(const SectorMesh& mesh, const Eigen::VectorXd& x);

}  // namespace henon
