#include "henon/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace henon {

std::string to_string(NodalCase c) {
  switch (c) {
    case NodalCase::Radial: return "radial";
    case NodalCase::Case1: return "case1";
    case NodalCase::Case2: return "case2";
    case NodalCase::Case3: return "case3";
    default: return "other";
  }
}

namespace {

inline int sign_of(double v, double band) {
  if (v > band) return 1;
  if (v < -band) return -1;
  return 0;
}

struct GridView {
  int nr_int;  // interior rings
  int nt;      // full angular count
  const Eigen::ArrayXXd* ring;
  double band;
  double pole;

  int sgn(int i, int j) const { return sign_of((*ring)(i, j), band); }
  int sgn_pole() const { return sign_of(pole, band); }
};

}  // namespace

Segmentation segment(const SectorMesh& mesh, const Field& f, double band_epsilon,
                     int n_override) {
  if (!(band_epsilon > 0.0 && band_epsilon < 0.1))
    throw std::invalid_argument("segment: band_epsilon must lie in (0, 0.1)");
  const double amp = max_abs(f);
  if (amp == 0.0) throw std::invalid_argument("segment: zero field has no nodal regions");

  Segmentation seg;
  seg.n_sym = (n_override > 0) ? n_override : mesh.n;
  seg.band_epsilon = band_epsilon;
  seg.field = unfold_full_disc(mesh, f, seg.full);
  if (seg.full.n_theta % seg.n_sym != 0)
    throw std::invalid_argument("segment: angular resolution incompatible with symmetry order");

  const int nr_int = seg.full.n_r - 1;
  const int nt = seg.full.n_theta;
  const double band = band_epsilon * amp;
  GridView g{nr_int, nt, &seg.field.ring, band, seg.field.pole};

  seg.label = Eigen::ArrayXXi::Constant(nr_int, nt, -1);
  seg.pole_label = -1;
  Eigen::ArrayXXi zlabel = Eigen::ArrayXXi::Constant(nr_int, nt, -1);
  int zpole = -1;

  long zero_nodes = 0;
  const long total_nodes = static_cast<long>(nr_int) * nt + 1;

  // flood fill; nodes encoded as i*nt + j, pole = -1
  auto flood = [&](bool zero_mode, auto&& classify_fn, Eigen::ArrayXXi& lab, int& pole_lab) {
    int next = 0;
    std::deque<long> queue;
    auto try_push = [&](long code, int want, int id) {
      if (code < 0) {
        if (pole_lab == -1 && classify_fn(-1) == want) {
          pole_lab = id;
          queue.push_back(code);
        }
        return;
      }
      const int i = static_cast<int>(code / nt), j = static_cast<int>(code % nt);
      if (lab(i, j) == -1 && classify_fn(code) == want) {
        lab(i, j) = id;
        queue.push_back(code);
      }
    };
    std::vector<int> comp_sign;
    auto grow = [&](long seed_code, int want) {
      const int id = next++;
      comp_sign.push_back(want);
      try_push(seed_code, want, id);
      while (!queue.empty()) {
        const long code = queue.front();
        queue.pop_front();
        if (code < 0) {
          for (int j = 0; j < nt; ++j) try_push(static_cast<long>(j), want, id);
          continue;
        }
        const int i = static_cast<int>(code / nt), j = static_cast<int>(code % nt);
        if (i > 0) try_push(code - nt, want, id);
        if (i + 1 < nr_int) try_push(code + nt, want, id);
        if (i == 0) try_push(-1, want, id);
        try_push(static_cast<long>(i) * nt + (j + 1) % nt, want, id);
        try_push(static_cast<long>(i) * nt + (j + nt - 1) % nt, want, id);
      }
    };
    // deterministic seeding order: pole, then ring-major
    {
      const int s = classify_fn(-1);
      const bool match = zero_mode ? (s == 0) : (s != 0);
      if (match && pole_lab == -1) grow(-1, s);
    }
    for (int i = 0; i < nr_int; ++i)
      for (int j = 0; j < nt; ++j) {
        const int s = classify_fn(static_cast<long>(i) * nt + j);
        const bool match = zero_mode ? (s == 0) : (s != 0);
        if (match && lab(i, j) == -1) grow(static_cast<long>(i) * nt + j, s);
      }
    return comp_sign;
  };

  auto sign_at = [&](long code) -> int {
    if (code < 0) return g.sgn_pole();
    return g.sgn(static_cast<int>(code / nt), static_cast<int>(code % nt));
  };

  const std::vector<int> region_signs = flood(false, sign_at, seg.label, seg.pole_label);
  const std::vector<int> zero_signs = flood(true, sign_at, zlabel, zpole);

  seg.regions.resize(region_signs.size());
  for (size_t k = 0; k < region_signs.size(); ++k) {
    seg.regions[k].sign = region_signs[k];
    seg.regions[k].spans_all_rays = true;  // refined below
  }
  std::vector<std::vector<char>> col_hit(region_signs.size(), std::vector<char>(nt, 0));
  for (int i = 0; i < nr_int; ++i)
    for (int j = 0; j < nt; ++j) {
      const int id = seg.label(i, j);
      if (id < 0) {
        ++zero_nodes;
        continue;
      }
      RegionInfo& r = seg.regions[id];
      ++r.node_count;
      col_hit[id][j] = 1;
      if (i >= nr_int - 2) r.touches_boundary = true;
    }
  if (seg.pole_label >= 0) {
    seg.regions[seg.pole_label].contains_origin = true;
    ++seg.regions[seg.pole_label].node_count;
  } else {
    ++zero_nodes;
  }
  for (size_t k = 0; k < seg.regions.size(); ++k) {
    bool all = true;
    for (int j = 0; j < nt; ++j)
      if (!col_hit[k][j]) {
        all = false;
        break;
      }
    seg.regions[k].spans_all_rays = all;
  }
  // n-invariance: the field tiles exactly, so a region is invariant iff one of
  // its nodes maps into the same component under the 2*pi/n shift
  const int shift = nt / seg.n_sym;
  for (int i = 0; i < nr_int; ++i)
    for (int j = 0; j < nt; ++j) {
      const int id = seg.label(i, j);
      if (id < 0) continue;
      if (!seg.regions[id].is_n_invariant && seg.label(i, (j + shift) % nt) == id)
        seg.regions[id].is_n_invariant = true;
    }
  for (auto& r : seg.regions)
    if (r.contains_origin) r.is_n_invariant = true;  // the pole is fixed by rotations
  if (seg.n_sym == 1)
    for (auto& r : seg.regions) r.is_n_invariant = true;

  seg.zero_components.resize(zero_signs.size());
  for (int i = 0; i < nr_int; ++i)
    for (int j = 0; j < nt; ++j) {
      const int id = zlabel(i, j);
      if (id < 0) continue;
      ++seg.zero_components[id].node_count;
      if (i >= nr_int - 2) seg.zero_components[id].touches_boundary = true;
    }
  if (zpole >= 0) {
    seg.zero_components[zpole].contains_origin = true;
    ++seg.zero_components[zpole].node_count;
  }
  seg.zero_band_fraction = static_cast<double>(zero_nodes) / total_nodes;
  return seg;
}

int sector_region_count(const Segmentation& seg) {
  const int nr_int = seg.full.n_r - 1;
  const int nt = seg.full.n_theta;
  const int win = nt / seg.n_sym;  // sector width in cells
  const double band = seg.band_epsilon * max_abs(seg.field);

  auto sgn = [&](int i, int j) { return sign_of(seg.field.ring(i, j), band); };
  const int pole_sgn = sign_of(seg.field.pole, band);

  int best = -1;
  std::vector<int> comp(static_cast<size_t>(nr_int) * win + 1);
  for (int off = 0; off < win; ++off) {
    std::fill(comp.begin(), comp.end(), -1);
    int count = 0;
    auto idx = [&](int i, int jj) { return static_cast<size_t>(i) * win + jj + 1; };
    std::deque<std::pair<int, int>> queue;  // (i, jj); pole = (-1, 0)
    auto visit = [&](int i, int jj, int want, int id) {
      const size_t node = (i < 0) ? 0 : idx(i, jj);
      if (comp[node] != -1) return;
      const int s = (i < 0) ? pole_sgn : sgn(i, (off + jj) % nt);
      if (s != want || s == 0) return;
      comp[node] = id;
      queue.emplace_back(i, jj);
    };
    for (int i0 = -1; i0 < nr_int; ++i0)
      for (int j0 = 0; j0 < ((i0 < 0) ? 1 : win); ++j0) {
        const size_t node = (i0 < 0) ? 0 : idx(i0, j0);
        if (comp[node] != -1) continue;
        const int s = (i0 < 0) ? pole_sgn : sgn(i0, (off + j0) % nt);
        if (s == 0) continue;
        const int id = count++;
        visit(i0, j0, s, id);
        while (!queue.empty()) {
          auto [i, jj] = queue.front();
          queue.pop_front();
          const int want = (i < 0) ? pole_sgn : sgn(i, (off + jj) % nt);
          if (i < 0) {
            for (int j = 0; j < win; ++j) visit(0, j, want, id);
            continue;
          }
          if (i > 0) visit(i - 1, jj, want, id);
          if (i + 1 < nr_int) visit(i + 1, jj, want, id);
          if (i == 0) visit(-1, 0, want, id);
          if (jj > 0) visit(i, jj - 1, want, id);       // no wrap across the sector edge
          if (jj + 1 < win) visit(i, jj + 1, want, id);
        }
      }
    if (best < 0 || count < best) best = count;
  }
  return best;
}

int max_regions_strictly_in_sector(const Segmentation& seg) {
  const int nt = seg.full.n_theta;
  const int win = nt / seg.n_sym;
  const int nr_int = seg.full.n_r - 1;
  const size_t nreg = seg.regions.size();
  std::vector<std::vector<char>> cols(nreg, std::vector<char>(nt, 0));
  for (int i = 0; i < nr_int; ++i)
    for (int j = 0; j < nt; ++j) {
      const int id = seg.label(i, j);
      if (id >= 0) cols[id][j] = 1;
    }
  int best = 0;
  for (int off = 0; off < nt; ++off) {
    int count = 0;
    for (size_t k = 0; k < nreg; ++k) {
      if (seg.regions[k].contains_origin) continue;
      bool inside = true;
      for (int j = 0; j < nt && inside; ++j) {
        if (!cols[k][j]) continue;
        const int rel = (j - off + nt) % nt;
        if (rel == 0 || rel >= win) inside = false;  // open sector: columns off+1 .. off+win-1
      }
      if (inside) ++count;
    }
    best = std::max(best, count);
  }
  return best;
}

namespace {

bool field_is_radial_rel(const Field& f, double rel_tol) {
  const double amp = max_abs(f);
  if (amp == 0.0) return true;
  for (Eigen::Index i = 0; i < f.ring.rows(); ++i) {
    if (f.ring.row(i).maxCoeff() - f.ring.row(i).minCoeff() > rel_tol * amp) return false;
  }
  return true;
}

}  // namespace

NodalCase classify(const Segmentation& seg, const ProblemParams& params, double radial_tol) {
  if (field_is_radial_rel(seg.field, radial_tol)) return NodalCase::Radial;
  const int n = params.n;
  const int rc = seg.region_count();

  bool origin_boundary_zero = false;
  bool zero_touches_boundary = false;
  for (const auto& z : seg.zero_components) {
    zero_touches_boundary = zero_touches_boundary || z.touches_boundary;
    if (z.contains_origin && z.touches_boundary) origin_boundary_zero = true;
  }

  if (rc == 2 * n && origin_boundary_zero) return NodalCase::Case1;

  int invariant_regions = 0;
  for (const auto& r : seg.regions) {
    const bool inv = (n == 1) ? r.spans_all_rays : r.is_n_invariant;
    if (inv) ++invariant_regions;
  }
  if (rc == n + 1 && invariant_regions == 1 && !origin_boundary_zero) return NodalCase::Case2;

  if (rc == 2 && invariant_regions == 2 && !zero_touches_boundary) return NodalCase::Case3;

  return NodalCase::Other;
}

double check_bisector_symmetry(const SectorMesh& mesh, const Field& f, int n) {
  (void)n;
  const double norm = std::sqrt(l2_sq(mesh, f));
  if (norm == 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < mesh.n_theta; ++k) {
    const Field s = angular_shift(mesh, f, k);
    const Field r = reflect_bisector(mesh, s);
    Field d;
    d.ring = s.ring - r.ring;
    d.pole = 0.0;
    best = std::min(best, std::sqrt(l2_sq(mesh, d)) / norm);
  }
  return best;
}

namespace {

double monotonicity_violation_aligned(const SectorMesh& mesh, const Field& f) {
  // positive part of the angular derivative over the semi-sector (0, pi/n)
  const int half = mesh.n_theta / 2;
  double worst = 0.0;
  for (int i = 0; i + 1 < mesh.n_r; ++i)
    for (int j = 0; j < half; ++j) {
      const double d = (f.ring(i, j + 1) - f.ring(i, j)) / mesh.dtheta;
      worst = std::max(worst, d);
    }
  return worst;
}

}  // namespace

double check_angular_monotonicity(const SectorMesh& mesh, const Field& f, int n) {
  (void)n;
  // align to the reflection symmetry first, then test both half-period phases
  double best_asym = std::numeric_limits<double>::infinity();
  int k_best = 0;
  const double norm = std::sqrt(l2_sq(mesh, f));
  if (norm == 0.0) return 0.0;
  for (int k = 0; k < mesh.n_theta; ++k) {
    const Field s = angular_shift(mesh, f, k);
    const Field r = reflect_bisector(mesh, s);
    Field d;
    d.ring = s.ring - r.ring;
    d.pole = 0.0;
    const double asym = std::sqrt(l2_sq(mesh, d)) / norm;
    if (asym < best_asym) {
      best_asym = asym;
      k_best = k;
    }
  }
  const Field a = angular_shift(mesh, f, k_best);
  const Field b = angular_shift(mesh, f, k_best + mesh.n_theta / 2);
  return std::min(monotonicity_violation_aligned(mesh, a), monotonicity_violation_aligned(mesh, b));
}

std::optional<int> origin_arc_order(const SectorMesh& mesh, const Field& f, double band_epsilon) {
  const double amp = max_abs(f);
  if (amp == 0.0) return std::nullopt;
  const double band = band_epsilon * amp;
  if (std::abs(f.pole) >= band) return std::nullopt;

  SectorMesh full;
  const Field uf = unfold_full_disc(mesh, f, full);
  const int nt = full.n_theta;
  // alternation counts on the first few rings; use the innermost ring where
  // the count stabilizes over two consecutive rings
  int prev = -1;
  for (int i = 1; i <= std::min(6, full.n_r - 2); ++i) {
    int first_sign = 0, last_sign = 0, changes = 0;
    for (int j = 0; j < nt; ++j) {
      const int s = sign_of(uf.ring(i, j), band);
      if (s == 0) continue;
      if (first_sign == 0) {
        first_sign = s;
      } else if (s != last_sign) {
        ++changes;
      }
      last_sign = s;
    }
    if (first_sign != 0 && last_sign != first_sign) ++changes;
    if (changes > 0 && changes == prev) return changes / 2;
    prev = changes;
  }
  if (prev > 0) return prev / 2;
  return std::nullopt;
}

std::vector<PerRegionEnergy> per_region_energy(const Segmentation& seg, double p) {
  const SectorMesh& m = seg.full;
  const int nr_int = m.n_r - 1;
  const int nt = m.n_theta;
  const size_t nreg = seg.regions.size();
  std::vector<PerRegionEnergy> out(nreg);
  if (nreg == 0) return out;

  // attach zero-band nodes to the nearest region (multi-source BFS, ties by
  // traversal order)
  Eigen::ArrayXXi assign = seg.label;
  int pole_assign = seg.pole_label;
  {
    std::deque<long> queue;  // codes, pole = -1
    for (int i = 0; i < nr_int; ++i)
      for (int j = 0; j < nt; ++j)
        if (assign(i, j) >= 0) queue.push_back(static_cast<long>(i) * nt + j);
    if (pole_assign >= 0) queue.push_back(-1);
    auto offer = [&](long code, int id) {
      if (code < 0) {
        if (pole_assign < 0) {
          pole_assign = id;
          queue.push_back(code);
        }
        return;
      }
      const int i = static_cast<int>(code / nt), j = static_cast<int>(code % nt);
      if (assign(i, j) < 0) {
        assign(i, j) = id;
        queue.push_back(code);
      }
    };
    while (!queue.empty()) {
      const long code = queue.front();
      queue.pop_front();
      if (code < 0) {
        for (int j = 0; j < nt; ++j) offer(static_cast<long>(j), pole_assign);
        continue;
      }
      const int i = static_cast<int>(code / nt), j = static_cast<int>(code % nt);
      const int id = assign(i, j);
      if (i > 0) offer(code - nt, id);
      if (i + 1 < nr_int) offer(code + nt, id);
      if (i == 0) offer(-1, id);
      offer(static_cast<long>(i) * nt + (j + 1) % nt, id);
      offer(static_cast<long>(i) * nt + (j + nt - 1) % nt, id);
    }
  }

  std::vector<CompensatedSum> grad(nreg), pot(nreg);
  const auto& u = seg.field.ring;
  auto add_edge = [&](int ida, int idb, double term) {
    if (ida == idb) {
      grad[ida].add(term);
    } else {
      grad[ida].add(0.5 * term);
      grad[idb].add(0.5 * term);
    }
  };
  for (int j = 0; j < nt; ++j) {
    const double d = u(0, j) - seg.field.pole;
    add_edge(pole_assign, assign(0, j), m.cond_pole * d * d);
  }
  for (int i = 0; i + 1 < m.n_r; ++i) {
    const double c = m.cond_rad[i];
    for (int j = 0; j < nt; ++j) {
      const double d = u(i + 1, j) - u(i, j);
      const int ida = assign(i, j);
      const int idb = (i + 1 < nr_int) ? assign(i + 1, j) : ida;  // boundary edge stays inside
      add_edge(ida, idb, c * d * d);
    }
  }
  for (int i = 0; i < nr_int; ++i) {
    const double c = m.cond_ang[i];
    for (int j = 0; j < nt; ++j) {
      const double d = u(i, (j + 1) % nt) - u(i, j);
      add_edge(assign(i, j), assign(i, (j + 1) % nt), c * d * d);
    }
  }
  pot[pole_assign].add(static_cast<double>(1) * m.pole_m * m.dtheta *
                       std::pow(std::abs(seg.field.pole), p + 1.0));
  for (int i = 0; i < nr_int; ++i)
    for (int j = 0; j < nt; ++j)
      pot[assign(i, j)].add(m.cell_m[i] * m.dtheta * std::pow(std::abs(u(i, j)), p + 1.0));

  for (size_t k = 0; k < nreg; ++k) {
    out[k].dirichlet = grad[k].value();
    out[k].scaled_dirichlet = p * out[k].dirichlet;
    out[k].scaled_energy = p * (0.5 * out[k].dirichlet - pot[k].value() / (p + 1.0));
    out[k].ratio_8pie = out[k].scaled_dirichlet / (8.0 * M_PI * M_E);
    out[k].ratio_4pie = out[k].scaled_energy / (4.0 * M_PI * M_E);
  }
  return out;
}

NodalReport analyze_field(const SectorMesh& mesh, const Field& f, const ProblemParams& params,
                          double band_epsilon, double radial_tol) {
  NodalReport rep;
  rep.band_epsilon = band_epsilon;
  Segmentation seg = segment(mesh, f, band_epsilon, params.n);
  const Segmentation seg_lo = segment(mesh, f, 0.5 * band_epsilon, params.n);
  const Segmentation seg_hi = segment(mesh, f, std::min(2.0 * band_epsilon, 0.099), params.n);
  rep.band_stable = (seg.region_count() == seg_lo.region_count()) &&
                    (seg.region_count() == seg_hi.region_count());

  rep.region_count = seg.region_count();
  rep.sector_region_count = sector_region_count(seg);
  rep.max_strictly_in_sector = max_regions_strictly_in_sector(seg);
  rep.zero_band_fraction = seg.zero_band_fraction;
  rep.nodal_case = classify(seg, params, radial_tol);
  rep.quasiradial = (rep.nodal_case == NodalCase::Case3);

  for (const auto& z : seg.zero_components) {
    rep.origin_in_nodal_set = rep.origin_in_nodal_set || z.contains_origin;
    rep.nodal_set_touches_boundary = rep.nodal_set_touches_boundary || z.touches_boundary;
  }
  const auto arc = origin_arc_order(mesh, f, band_epsilon);
  rep.origin_arc_order = arc ? *arc : -1;

  const auto energies = per_region_energy(seg, params.p);
  rep.regions = seg.regions;
  for (size_t k = 0; k < rep.regions.size() && k < energies.size(); ++k) {
    rep.regions[k].dirichlet_energy = energies[k].dirichlet;
    rep.regions[k].scaled_dirichlet = energies[k].scaled_dirichlet;
    rep.regions[k].scaled_energy = energies[k].scaled_energy;
  }

  rep.monotonicity_violation = check_angular_monotonicity(mesh, f, params.n);
  rep.bisector_asymmetry = check_bisector_symmetry(mesh, f, params.n);

  const CasePrediction pred = predict_cases(params);
  switch (rep.nodal_case) {
    case NodalCase::Case1: rep.case_consistent = pred.case1_admissible; break;
    case NodalCase::Case2: rep.case_consistent = pred.case2_admissible; break;
    case NodalCase::Case3: rep.case_consistent = true; break;
    default: rep.case_consistent = false; break;  // radial or anomalous minimizers are findings
  }
  return rep;
}

}  // namespace henon
