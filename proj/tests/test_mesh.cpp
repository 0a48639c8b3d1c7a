#include <doctest.h>

#include <cmath>
#include <random>

#include "henon/mesh.hpp"
#include "henon/nehari.hpp"

using namespace henon;

namespace {

Field random_field(const SectorMesh& mesh, unsigned seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  Field f = zero_field(mesh);
  f.pole = dist(rng);
  for (int i = 0; i + 1 < mesh.n_r; ++i)
    for (int j = 0; j < mesh.n_theta; ++j) f.ring(i, j) = dist(rng);
  return f;
}

Field cos_mode_field(const SectorMesh& mesh, int k) {
  Field f = zero_field(mesh);
  for (int i = 0; i + 1 < mesh.n_r; ++i) {
    const double rr = mesh.r[i];
    const double fr = rr * rr * (1.0 - rr);
    for (int j = 0; j < mesh.n_theta; ++j) f.ring(i, j) = fr * std::cos(k * j * mesh.dtheta);
  }
  return f;
}

// inverse-power iteration oracle for the lowest Dirichlet eigenvalue
double lambda1(const SectorMesh& mesh) {
  const auto A = stiffness_matrix(mesh);
  const Eigen::VectorXd w = mass_weights(mesh);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(A);
  REQUIRE(chol.info() == Eigen::Success);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(mesh.dof_count());
  double lam = 0.0;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd rhs = w.cwiseProduct(v);
    v = chol.solve(rhs);
    v /= std::sqrt(v.dot(w.cwiseProduct(v)));
    lam = v.dot(A * v);
  }
  return lam;
}

constexpr double kLambda1Disc = 5.78318596294679;  // squared first zero of J0

}  // namespace

TEST_CASE("build_mesh arithmetic and guards") {
  const SectorMesh m1 = build_mesh(1, 64, 64, Grading::Uniform, 0.0);
  CHECK(m1.dtheta == doctest::Approx(2.0 * M_PI / 64).epsilon(1e-15));
  CHECK(std::abs(m1.dtheta * m1.n * m1.n_theta - 2.0 * M_PI) <= 1e-14);
  CHECK(m1.r[m1.n_r - 1] == 1.0);

  const SectorMesh m4 = build_mesh(4, 64, 32, Grading::Uniform, 0.0);
  CHECK(m4.dtheta == doctest::Approx(2.0 * M_PI / 128).epsilon(1e-15));
  CHECK(std::abs(m4.dtheta * m4.n * m4.n_theta - 2.0 * M_PI) <= 1e-14);

  CHECK_THROWS_AS(build_mesh(1, 8, 8, Grading::Uniform, 0.0), ConfigError);
  CHECK_THROWS_AS(build_mesh(1, 64, 4, Grading::Uniform, 0.0), ConfigError);
  CHECK_THROWS_AS(build_mesh(0, 64, 64, Grading::Uniform, 0.0), ConfigError);

  const SectorMesh mg = build_mesh(2, 64, 32, Grading::Boundary, 1.5);
  for (int i = 0; i + 1 < mg.n_r; ++i) CHECK(mg.r[i] < mg.r[i + 1]);
  CHECK(mg.r[mg.n_r - 1] == 1.0);
}

TEST_CASE("weighted integral: disc areas and moments") {
  for (Grading g : {Grading::Uniform, Grading::Boundary}) {
    const SectorMesh mesh = build_mesh(1, 64, 16, g, 0.0);
    Field one = zero_field(mesh);
    one.pole = 1.0;
    one.ring.setOnes();  // Dirichlet relaxed: the boundary ring participates
    CHECK(weighted_integral(mesh, one, 1.0) == doctest::Approx(M_PI).epsilon(1e-12));
  }
  const SectorMesh mesh2 = build_mesh(1, 64, 16, Grading::Uniform, 2.0);
  Field one2 = zero_field(mesh2);
  one2.pole = 1.0;
  one2.ring.setOnes();
  CHECK(weighted_integral(mesh2, one2, 1.0) == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
}

TEST_CASE("weighted integral: overflow-safe accumulation against a long-double oracle") {
  const SectorMesh mesh = build_mesh(2, 24, 12, Grading::Uniform, 1.0);
  Field f = random_field(mesh, 7, 1.0);
  f.ring *= 1e3;
  f.pole *= 1e3;
  const double q = 101.0;  // p = 100
  const double got = weighted_integral(mesh, f, q);
  CHECK(std::isfinite(got));

  long double acc = 0.0L;
  acc += (long double)mesh.n_theta * mesh.pole_m *
         std::pow((long double)std::abs(f.pole), (long double)q);
  for (int i = 0; i < mesh.n_r; ++i)
    for (int j = 0; j < mesh.n_theta; ++j)
      acc += (long double)mesh.cell_m[i] * std::pow((long double)std::abs(f.ring(i, j)), (long double)q);
  acc *= (long double)mesh.n * mesh.dtheta;
  CHECK(got == doctest::Approx(static_cast<double>(acc)).epsilon(1e-10));
}

TEST_CASE("dirichlet energy: zero field and lowest disc eigenvalue") {
  const SectorMesh mesh = build_mesh(1, 64, 16, Grading::Uniform, 0.0);
  CHECK(dirichlet_energy(mesh, zero_field(mesh)) == 0.0);

  const SectorMesh fine = build_mesh(1, 256, 16, Grading::Uniform, 0.0);
  const double lam = lambda1(fine);
  CHECK(std::abs(lam - kLambda1Disc) / kLambda1Disc < 0.005);
}

TEST_CASE("lowest eigenvalue converges at second order") {
  const double e64 = std::abs(lambda1(build_mesh(1, 64, 16, Grading::Uniform, 0.0)) - kLambda1Disc);
  const double e128 =
      std::abs(lambda1(build_mesh(1, 128, 16, Grading::Uniform, 0.0)) - kLambda1Disc);
  const double ratio = e64 / e128;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("energy identity on the Nehari set") {
  const SectorMesh mesh = build_mesh(2, 32, 16, Grading::Uniform, 1.0);
  const double p = 7.0;
  Field f = random_field(mesh, 11);
  const Field w = nehari_scale(mesh, f, p);
  const double e = energy(mesh, w, p);
  const double d = dirichlet_energy(mesh, w);
  CHECK(e == doctest::Approx((p - 1.0) / (2.0 * (p + 1.0)) * d).epsilon(1e-12));
  CHECK(energy(mesh, zero_field(mesh), p) == 0.0);
}

TEST_CASE("pde residual: zero field exact, random field positive") {
  const SectorMesh mesh = build_mesh(1, 32, 16, Grading::Uniform, 0.0);
  CHECK(pde_residual(mesh, zero_field(mesh), 3.0) == 0.0);
  CHECK(pde_residual(mesh, random_field(mesh, 3), 3.0) > 0.0);
}

TEST_CASE("unfold: identity for n=1, cosine consistency, energy additivity") {
  const SectorMesh m1 = build_mesh(1, 32, 32, Grading::Uniform, 0.0);
  const Field f1 = random_field(m1, 5);
  SectorMesh full1;
  const Field u1 = unfold_full_disc(m1, f1, full1);
  CHECK((u1.ring == f1.ring).all());

  const SectorMesh m4 = build_mesh(4, 32, 16, Grading::Uniform, 0.0);
  const Field f4 = cos_mode_field(m4, 4);
  SectorMesh full4;
  const Field u4 = unfold_full_disc(m4, f4, full4);
  for (int i = 0; i + 1 < full4.n_r; ++i)
    for (int j = 0; j < full4.n_theta; ++j) {
      const double expect = m4.r[i] * m4.r[i] * (1.0 - m4.r[i]) * std::cos(4.0 * j * full4.dtheta);
      CHECK(u4.ring(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  const double e_sector = dirichlet_energy(m4, f4);
  const double e_full = dirichlet_energy(full4, u4);
  CHECK(e_full == doctest::Approx(e_sector).epsilon(1e-12));
}

TEST_CASE("symmetry actions: involution, periodicity, exact energy invariance") {
  const SectorMesh mesh = build_mesh(3, 32, 24, Grading::Uniform, 0.0);
  const Field f = random_field(mesh, 13);

  const Field rr = reflect_bisector(mesh, reflect_bisector(mesh, f));
  CHECK((rr.ring == f.ring).all());
  const Field sh = angular_shift(mesh, f, mesh.n_theta);
  CHECK((sh.ring == f.ring).all());

  // energy commutes with the actions (compensated sums make the permuted
  // reductions reproduce the same double)
  const double e0 = dirichlet_energy(mesh, f);
  CHECK(dirichlet_energy(mesh, angular_shift(mesh, f, 5)) == e0);
  CHECK(dirichlet_energy(mesh, reflect_bisector(mesh, f)) == e0);
}

TEST_CASE("reflection symmetry of aligned cosine modes") {
  const SectorMesh mesh = build_mesh(2, 32, 16, Grading::Uniform, 0.0);
  const int n = 2;
  // f(r) cos(n(theta - pi/n)) is symmetric about the bisector
  Field sym = zero_field(mesh);
  for (int i = 0; i + 1 < mesh.n_r; ++i)
    for (int j = 0; j < mesh.n_theta; ++j) {
      const double th = j * mesh.dtheta;
      sym.ring(i, j) = mesh.r[i] * std::cos(n * (th - M_PI / n));
    }
  Field d;
  d.ring = sym.ring - reflect_bisector(mesh, sym).ring;
  d.pole = 0.0;
  CHECK(std::sqrt(l2_sq(mesh, d)) < 1e-12);

  // a generic phase is measurably asymmetric
  Field askew = cos_mode_field(mesh, 3);
  Field d2;
  d2.ring = askew.ring - reflect_bisector(mesh, askew).ring;
  d2.pole = 0.0;
  CHECK(std::sqrt(l2_sq(mesh, d2)) > 1e-3);
}

TEST_CASE("quadrature and stiffness agree with the dof forms") {
  const SectorMesh mesh = build_mesh(2, 24, 12, Grading::Boundary, 1.0);
  const Field f = random_field(mesh, 17);
  Field fd = f;
  fd.ring.row(mesh.n_r - 1).setZero();  // Dirichlet fields only
  const auto A = stiffness_matrix(mesh);
  const Eigen::VectorXd x = to_dofs(mesh, fd);
  CHECK(mesh.n * x.dot(A * x) == doctest::Approx(dirichlet_energy(mesh, fd)).epsilon(1e-12));
  const Field back = from_dofs(mesh, x);
  CHECK((back.ring == fd.ring).all());
  CHECK(back.pole == fd.pole);
}
