#include "henon/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace henon {

namespace {

Eigen::VectorXd potential_dofs(const SectorMesh& mesh, const Field& u, double p) {
  // p * rho_i * |u_i|^{p-1} per dof
  Eigen::VectorXd v(mesh.dof_count());
  v[0] = p * mesh.rho_pole() * std::pow(std::abs(u.pole), p - 1.0);
  for (int i = 0; i + 1 < mesh.n_r; ++i) {
    const double rho = mesh.rho(i);
    for (int j = 0; j < mesh.n_theta; ++j)
      v[mesh.dof(i, j)] = p * rho * std::pow(std::abs(u.ring(i, j)), p - 1.0);
  }
  return v;
}

Eigen::SparseMatrix<double> linearized_matrix(const SectorMesh& mesh, const Field& u, double p,
                                              const Eigen::VectorXd& w) {
  Eigen::SparseMatrix<double> K = stiffness_matrix(mesh);
  const Eigen::VectorXd pot = potential_dofs(mesh, u, p);
  for (int i = 0; i < K.rows(); ++i) K.coeffRef(i, i) -= w[i] * pot[i];
  return K;
}

double gershgorin_scale(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& w) {
  double scale = 0.0;
  for (int col = 0; col < K.outerSize(); ++col) {
    double diag = 0.0, off = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      if (it.row() == col)
        diag = it.value();
      else
        off += std::abs(it.value());
    }
    scale = std::max(scale, (std::abs(diag) + off) / w[col]);
  }
  return scale;
}

int ldlt_count_below(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& w, double s,
                     bool* ok) {
  Eigen::SparseMatrix<double> M = K;
  for (int i = 0; i < M.rows(); ++i) M.coeffRef(i, i) -= s * w[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.compute(M);
  if (ldlt.info() != Eigen::Success) {
    if (ok) *ok = false;
    return -1;
  }
  const auto d = ldlt.vectorD();
  int count = 0;
  bool healthy = true;
  for (int i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i])) healthy = false;
    if (d[i] < 0.0) ++count;
  }
  if (ok) *ok = healthy;
  return count;
}

// counts eigenvalues of the pencil (K, W) below s, nudging the shift when the
// unpivoted factorization hits a bad pivot
int count_below(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& w, double s,
                double scale) {
  for (int attempt = 0; attempt < 6; ++attempt) {
    bool ok = true;
    const double nudge = attempt * 3e-12 * scale;
    const int c = ldlt_count_below(K, w, s + nudge, &ok);
    if (ok && c >= 0) return c;
  }
  throw SolverError("spectrum: inertia factorization failed");
}

// smallest eigenvalues of the pencil by shift-invert Lanczos with full
// W-reorthogonalization; sigma sits below the spectrum so the factor is SPD
std::vector<double> lanczos_smallest(const Eigen::SparseMatrix<double>& K,
                                     const Eigen::VectorXd& w, double sigma, int m, int iters) {
  const int n = static_cast<int>(w.size());
  Eigen::SparseMatrix<double> M = K;
  for (int i = 0; i < n; ++i) M.coeffRef(i, i) -= sigma * w[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.compute(M);
  if (ldlt.info() != Eigen::Success) throw SolverError("spectrum: shift-invert factorization failed");

  iters = std::min(iters, n);
  std::vector<Eigen::VectorXd> V;
  V.reserve(iters);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) + 1e-3 * Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
  v /= std::sqrt(v.dot(w.cwiseProduct(v)));
  std::vector<double> alpha, beta;
  Eigen::VectorXd v_prev = Eigen::VectorXd::Zero(n);
  double b_prev = 0.0;
  for (int j = 0; j < iters; ++j) {
    V.push_back(v);
    Eigen::VectorXd y = ldlt.solve(w.cwiseProduct(v));
    const double a = y.dot(w.cwiseProduct(v));
    alpha.push_back(a);
    y -= a * v + b_prev * v_prev;
    for (const auto& q : V) y -= q.dot(w.cwiseProduct(y)) * q;  // full reorth
    const double b = std::sqrt(std::max(0.0, y.dot(w.cwiseProduct(y))));
    if (b < 1e-14 || j + 1 == iters) {
      beta.push_back(0.0);
      break;
    }
    beta.push_back(b);
    v_prev = v;
    v = y / b;
    b_prev = b;
  }
  const int k = static_cast<int>(alpha.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < k && beta[i] != 0.0) {
      T(i, i + 1) = beta[i];
      T(i + 1, i) = beta[i];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
  std::vector<double> lam;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double theta = es.eigenvalues()[i];
    if (theta > 1e-300) lam.push_back(sigma + 1.0 / theta);
  }
  std::sort(lam.begin(), lam.end());
  if (static_cast<int>(lam.size()) > m) lam.resize(m);
  return lam;
}

SpectralReport analyze_pencil(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& w,
                              double pot_max, const SpectrumOptions& opts, const std::string& grid,
                              const std::string& subspace) {
  SpectralReport rep;
  rep.grid = grid;
  rep.subspace = subspace;
  const int n = static_cast<int>(w.size());
  if (n <= opts.dense_threshold) {
    rep.method = "dense-oracle";
    Eigen::MatrixXd B = Eigen::MatrixXd(K);
    const Eigen::VectorXd si = w.cwiseSqrt().cwiseInverse();
    B = si.asDiagonal() * B * si.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      rep.converged = false;
      return rep;
    }
    const auto& lam = es.eigenvalues();
    rep.scale = std::max(std::abs(lam[0]), std::abs(lam[lam.size() - 1]));
    const double band = opts.marginal_band_rel * rep.scale;
    for (int i = 0; i < lam.size(); ++i) {
      if (lam[i] < -band) ++rep.negative_count;
      else if (lam[i] <= band) ++rep.marginal_count;
    }
    const int m = std::min<int>(opts.n_smallest, lam.size());
    rep.smallest_eigenvalues.assign(lam.data(), lam.data() + m);
    // stability of the count under a tiny threshold shift
    const double eps = 1e-10 * rep.scale;
    int lo = 0, hi = 0;
    for (int i = 0; i < lam.size(); ++i) {
      if (lam[i] < -band - eps) ++lo;
      if (lam[i] < -band + eps) ++hi;
    }
    rep.count_stable = (lo == hi);
  } else {
    rep.method = "iterative";
    rep.scale = gershgorin_scale(K, w);
    const double band = opts.marginal_band_rel * rep.scale;
    rep.negative_count = count_below(K, w, -band, rep.scale);
    const int below_plus = count_below(K, w, band, rep.scale);
    rep.marginal_count = std::max(0, below_plus - rep.negative_count);
    const double eps = 1e-10 * rep.scale;
    rep.count_stable = (count_below(K, w, -band - eps, rep.scale) ==
                        count_below(K, w, -band + eps, rep.scale));
    const double sigma = -1.05 * pot_max - 1.0;
    rep.smallest_eigenvalues = lanczos_smallest(K, w, sigma, opts.n_smallest, opts.lanczos_iters);
    // the eigenvalue list must not contradict the factorization count
    int neg_in_list = 0;
    for (double l : rep.smallest_eigenvalues)
      if (l < -band) ++neg_in_list;
    if (rep.negative_count <= static_cast<int>(rep.smallest_eigenvalues.size()) &&
        neg_in_list != rep.negative_count)
      rep.converged = false;
  }
  return rep;
}

bool field_is_radial(const Field& f, double rel_tol) {
  const double amp = max_abs(f);
  if (amp == 0.0) return true;
  for (Eigen::Index i = 0; i < f.ring.rows(); ++i) {
    const double var = f.ring.row(i).maxCoeff() - f.ring.row(i).minCoeff();
    if (var > rel_tol * amp) return false;
  }
  return true;
}

// ---- 1-D radial operators (tridiagonal, Sturm counts) ----

struct Tridiag {
  Eigen::VectorXd diag, off;  // similarity-scaled symmetric form
};

int sturm_count_below(const Tridiag& t, double s) {
  const int n = static_cast<int>(t.diag.size());
  int count = 0;
  double q = t.diag[0] - s;
  if (q < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    double denom = q;
    if (denom == 0.0) denom = -1e-300;
    q = t.diag[i] - s - t.off[i - 1] * t.off[i - 1] / denom;
    if (q < 0.0) ++count;
  }
  return count;
}

double sturm_kth_eigenvalue(const Tridiag& t, int k, double lo, double hi) {
  // smallest index k (0-based): bisect on the count
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count_below(t, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// per-unit-angle radial FV data extracted from a sector mesh
struct Radial1D {
  const SectorMesh* mesh;
  Eigen::VectorXd u_abs_pm1;  // |u_i|^{p-1} at interior rings
  double u_pole_pm1;
  double p;
};

// builds the tridiagonal for angular mode k; mode_coeff(i) multiplies the
// angular symbol value at ring i
Tridiag mode_matrix(const Radial1D& rd, double sym_value, AngularSymbol symbol, int k) {
  const SectorMesh& m = *rd.mesh;
  const int nr_int = m.n_r - 1;
  const bool with_pole = (k == 0);
  const int dim = nr_int + (with_pole ? 1 : 0);
  Eigen::VectorXd wv(dim), diag(dim);
  Eigen::VectorXd off(dim - 1);

  auto g_rad = [&](int i) { return m.cond_rad[i] / m.dtheta; };
  const double g_pole = m.cond_pole / m.dtheta;  // = 1/2

  const int base = with_pole ? 1 : 0;
  if (with_pole) {
    wv[0] = m.pole_a;
    diag[0] = g_pole - m.pole_a * rd.p * m.rho_pole() * rd.u_pole_pm1;
  }
  for (int i = 0; i < nr_int; ++i) {
    const double w = m.cell_a[i];
    wv[base + i] = w;
    double d = g_rad(i);                    // outward edge (to ring i+1 or Dirichlet)
    d += (i == 0) ? g_pole : g_rad(i - 1);  // inward edge
    double mode_term;
    if (symbol == AngularSymbol::Continuum) {
      mode_term = sym_value / (m.r[i] * m.r[i]);
    } else {
      const double beta = std::log(m.r_face[i + 1] / m.r_face[i]) / m.cell_a[i];
      mode_term = beta * sym_value;  // sym_value = mu_k here
    }
    d += w * mode_term - w * rd.p * m.rho(i) * rd.u_abs_pm1[i];
    diag[base + i] = d;
  }
  if (with_pole) off[0] = -g_pole;
  for (int i = 0; i + 1 < nr_int; ++i) off[base + i] = -g_rad(i);

  Tridiag t;
  t.diag.resize(dim);
  t.off.resize(dim - 1);
  for (int i = 0; i < dim; ++i) t.diag[i] = diag[i] / wv[i];
  for (int i = 0; i + 1 < dim; ++i) t.off[i] = off[i] / std::sqrt(wv[i] * wv[i + 1]);
  return t;
}

double tridiag_scale(const Tridiag& t) {
  double s = 0.0;
  const int n = static_cast<int>(t.diag.size());
  for (int i = 0; i < n; ++i) {
    double row = std::abs(t.diag[i]);
    if (i > 0) row += std::abs(t.off[i - 1]);
    if (i + 1 < n) row += std::abs(t.off[i]);
    s = std::max(s, row);
  }
  return s;
}

}  // namespace

Field linearized_apply(const SectorMesh& mesh, const Field& u, double p, const Field& psi) {
  if (!compatible(mesh, u) || !compatible(mesh, psi))
    throw std::invalid_argument("linearized_apply: field/mesh mismatch");
  Field out = apply_neg_laplacian(mesh, psi);
  out.pole -= p * mesh.rho_pole() * std::pow(std::abs(u.pole), p - 1.0) * psi.pole;
  for (int i = 0; i + 1 < mesh.n_r; ++i) {
    const double rho = mesh.rho(i);
    for (int j = 0; j < mesh.n_theta; ++j)
      out.ring(i, j) -= p * rho * std::pow(std::abs(u.ring(i, j)), p - 1.0) * psi.ring(i, j);
  }
  return out;
}

double q_form(const SectorMesh& mesh, const Field& u, double p, const Field& psi) {
  CompensatedSum s;
  s.add(dirichlet_energy(mesh, psi));
  CompensatedSum pot;
  pot.add(static_cast<double>(mesh.n_theta) * mesh.pole_m *
          std::pow(std::abs(u.pole), p - 1.0) * psi.pole * psi.pole);
  for (int i = 0; i + 1 < mesh.n_r; ++i) {
    const double m = mesh.cell_m[i];
    for (int j = 0; j < mesh.n_theta; ++j)
      pot.add(m * std::pow(std::abs(u.ring(i, j)), p - 1.0) * psi.ring(i, j) * psi.ring(i, j));
  }
  s.add(-p * pot.value() * mesh.n * mesh.dtheta);
  return s.value();
}

SpectralReport morse_index_symmetric(const SectorMesh& mesh, const Field& u, double p,
                                     const SpectrumOptions& opts) {
  if (!compatible(mesh, u)) throw std::invalid_argument("morse_index_symmetric: mesh mismatch");
  const Eigen::VectorXd w = mass_weights(mesh);
  const Eigen::SparseMatrix<double> K = linearized_matrix(mesh, u, p, w);
  const Eigen::VectorXd pot = potential_dofs(mesh, u, p);
  std::ostringstream tag;
  tag << "sector " << mesh.n_r << "x" << mesh.n_theta << " n=" << mesh.n;
  return analyze_pencil(K, w, pot.maxCoeff(), opts, tag.str(), "n-invariant");
}

SpectralReport morse_index_full(const SectorMesh& mesh, const Field& u, double p,
                                const SpectrumOptions& opts) {
  if (!compatible(mesh, u)) throw std::invalid_argument("morse_index_full: mesh mismatch");

  if (field_is_radial(u, 1e-12)) {
    // angular-mode fast path; symbol matched to this mesh's full-disc grid
    RadialProfile prof;
    prof.p = p;
    prof.alpha = mesh.alpha;
    prof.central_value = u.pole;
    const int nr = mesh.n_r;
    prof.r.resize(nr + 1);
    prof.v.resize(nr + 1);
    prof.dv = Eigen::VectorXd::Zero(nr + 1);
    prof.r[0] = 0.0;
    prof.v[0] = u.pole;
    for (int i = 0; i < nr; ++i) {
      prof.r[i + 1] = mesh.r[i];
      prof.v[i + 1] = u.ring(i, 0);
    }
    const int ntheta_full = mesh.n * mesh.n_theta;
    ModeDecomposition md =
        radial_mode_decomposition(prof, p, ntheta_full / 2, mesh.n_r, mesh.grading,
                                  AngularSymbol::Matched, ntheta_full, opts.marginal_band_rel);
    SpectralReport rep;
    rep.method = "radial-modes";
    rep.subspace = "full";
    std::ostringstream tag;
    tag << "radial " << mesh.n_r << " modes<=" << md.k_max;
    rep.grid = tag.str();
    rep.negative_count = md.total();
    rep.smallest_eigenvalues = md.smallest_eigenvalues;
    if (static_cast<int>(rep.smallest_eigenvalues.size()) > opts.n_smallest)
      rep.smallest_eigenvalues.resize(opts.n_smallest);
    return rep;
  }

  // nonradial: unfold onto the coarse full-disc oracle grid
  SectorMesh full;
  Field uf = unfold_full_disc(mesh, u, full);
  const int cnr = std::min(opts.coarse_nr, mesh.n_r);
  const int cnt = std::min(opts.coarse_ntheta_per_n * mesh.n, full.n_theta);
  SectorMesh coarse = build_mesh(1, cnr, cnt, mesh.grading, mesh.alpha);
  // sample the unfolded field onto the coarse grid (bilinear in r and theta)
  Field uc = zero_field(coarse);
  uc.pole = uf.pole;
  for (int i = 0; i + 1 < coarse.n_r; ++i) {
    const double rr = coarse.r[i];
    // radial bracket on the fine grid
    int lo = 0;
    while (lo + 1 < full.n_r && full.r[lo + 1] < rr) ++lo;
    for (int j = 0; j < coarse.n_theta; ++j) {
      const double th = j * coarse.dtheta;
      const double tj = th / full.dtheta;
      const int j0 = static_cast<int>(std::floor(tj)) % full.n_theta;
      const int j1 = (j0 + 1) % full.n_theta;
      const double ft = tj - std::floor(tj);
      auto value_at = [&](int ri) -> double {
        if (ri < 0) return uf.pole;
        return (1.0 - ft) * uf.ring(ri, j0) + ft * uf.ring(ri, j1);
      };
      double v0, v1, r0, r1;
      if (rr < full.r[0]) {
        v0 = uf.pole;
        r0 = 0.0;
        v1 = value_at(0);
        r1 = full.r[0];
      } else {
        v0 = value_at(lo);
        r0 = full.r[lo];
        v1 = value_at(lo + 1);
        r1 = full.r[lo + 1];
      }
      const double fr = (rr - r0) / (r1 - r0);
      uc.ring(i, j) = (1.0 - fr) * v0 + fr * v1;
    }
  }
  const Eigen::VectorXd w = mass_weights(coarse);
  const Eigen::SparseMatrix<double> K = linearized_matrix(coarse, uc, p, w);
  const Eigen::VectorXd pot = potential_dofs(coarse, uc, p);
  std::ostringstream tag;
  tag << "full-disc " << coarse.n_r << "x" << coarse.n_theta;
  return analyze_pencil(K, w, pot.maxCoeff(), opts, tag.str(), "full");
}

int ModeDecomposition::total() const {
  if (counts.empty()) return 0;
  int t = counts[0];
  const int nyquist = (ntheta_full > 0) ? ntheta_full / 2 : -1;
  for (int k = 1; k < static_cast<int>(counts.size()); ++k)
    t += (k == nyquist) ? counts[k] : 2 * counts[k];
  return t;
}

ModeDecomposition radial_mode_decomposition(const RadialProfile& profile, double p, int k_max,
                                            int n_r, Grading grading, AngularSymbol symbol,
                                            int ntheta_full, double marginal_band_rel) {
  if (k_max < 8) throw std::invalid_argument("radial_mode_decomposition: k_max must be >= 8");
  if (symbol == AngularSymbol::Matched && (ntheta_full < 2 || k_max > ntheta_full / 2))
    throw std::invalid_argument("radial_mode_decomposition: matched symbol needs k_max <= N_theta/2");

  SectorMesh mesh = build_mesh(1, n_r, 8, grading, profile.alpha);
  Radial1D rd;
  rd.mesh = &mesh;
  rd.p = p;
  rd.u_pole_pm1 = std::pow(std::abs(profile.central_value), p - 1.0);
  rd.u_abs_pm1.resize(mesh.n_r - 1);
  for (int i = 0; i + 1 < mesh.n_r; ++i)
    rd.u_abs_pm1[i] = std::pow(std::abs(profile.eval(mesh.r[i])), p - 1.0);

  ModeDecomposition md;
  md.k_max = k_max;
  md.ntheta_full = (symbol == AngularSymbol::Matched) ? ntheta_full : 0;
  md.counts.resize(k_max + 1, 0);
  std::vector<double> eigs;
  for (int k = 0; k <= k_max; ++k) {
    double sym;
    if (symbol == AngularSymbol::Continuum) {
      sym = static_cast<double>(k) * k;
    } else {
      const double dth = 2.0 * M_PI / ntheta_full;
      sym = (2.0 - 2.0 * std::cos(k * dth)) / (dth * dth);
    }
    const Tridiag t = mode_matrix(rd, sym, symbol, k);
    const double scale = tridiag_scale(t);
    const double band = marginal_band_rel * scale;
    md.counts[k] = sturm_count_below(t, -band);
    // collect negative eigenvalues (and the first nonnegative) for the report
    const int mult = (k == 0 || (md.ntheta_full > 0 && k == md.ntheta_full / 2)) ? 1 : 2;
    const int want = std::min(md.counts[k] + 1, static_cast<int>(t.diag.size()));
    for (int e = 0; e < want; ++e) {
      const double lam = sturm_kth_eigenvalue(t, e, -scale, scale);
      for (int c = 0; c < mult; ++c) eigs.push_back(lam);
    }
  }
  if (md.counts[k_max] > 0)
    throw SolverError("radial_mode_decomposition: count at k_max still positive, raise k_max");
  std::sort(eigs.begin(), eigs.end());
  if (eigs.size() > 16) eigs.resize(16);
  md.smallest_eigenvalues = eigs;
  return md;
}

}  // namespace henon
