#pragma once

#include <optional>
#include <string>
#include <vector>

#include "henon/mesh.hpp"
#include "henon/radial.hpp"

namespace henon {

// Negative-eigenvalue counts of the linearized operator
//   L psi = -Delta psi - p |x|^alpha |u|^{p-1} psi
// in the weighted (generalized) sense. Counting is the contract, not the
// accuracy of individual eigenvalues; eigenvalues inside the marginal band
// (+-band_rel * spectral scale) are reported separately and never counted
// negative (discrete kernels from symmetry land there).
struct SpectralReport {
  int negative_count = 0;
  int marginal_count = 0;
  std::vector<double> smallest_eigenvalues;  // ascending, at least 8 when available
  std::string subspace;                      // "n-invariant" or "full"
  std::string grid;
  std::string method;  // "dense-oracle", "iterative" or "radial-modes"
  bool converged = true;
  bool count_stable = true;  // stable under a 1e-10*scale shift of the zero threshold
  double scale = 0.0;        // spectral scale used for the bands
};

struct SpectrumOptions {
  int dense_threshold = 2800;      // max dofs for the dense path
  double marginal_band_rel = 1e-9;
  int lanczos_iters = 160;
  int n_smallest = 8;
  int coarse_nr = 48;              // coarse full-disc oracle resolution
  int coarse_ntheta_per_n = 48;
};

Field linearized_apply(const SectorMesh& mesh, const Field& u, double p, const Field& psi);

// Quadratic form Q_u(psi) = int |grad psi|^2 - p int |x|^alpha |u|^{p-1} psi^2
double q_form(const SectorMesh& mesh, const Field& u, double p, const Field& psi);

// Morse index restricted to the n-invariant space (the sector grid with its
// rotational periodicity is exactly that restriction).
SpectralReport morse_index_symmetric(const SectorMesh& mesh, const Field& u, double p,
                                     const SpectrumOptions& opts = {});

// Morse index over the full space. Radial fields take the angular-mode fast
// path; nonradial fields are unfolded and assembled on a coarse full-disc
// grid (dense when small enough, factorization counts otherwise).
SpectralReport morse_index_full(const SectorMesh& mesh, const Field& u, double p,
                                const SpectrumOptions& opts = {});

enum class AngularSymbol {
  Continuum,  // k^2 / r^2
  Matched     // discrete angular symbol of the 2-D grid with given N_theta
};

struct ModeDecomposition {
  std::vector<int> counts;  // negative count per angular mode k = 0..k_max
  int k_max = 0;
  int ntheta_full = 0;  // 0 for the continuum symbol
  std::vector<double> smallest_eigenvalues;  // merged over modes with multiplicity
  int m_rad() const { return counts.empty() ? 0 : counts[0]; }
  // full index: k = 0 once, k >= 1 twice (cos and sin), Nyquist once when the
  // symbol is matched to a grid of ntheta_full cells
  int total() const;
};

ModeDecomposition radial_mode_decomposition(const RadialProfile& profile, double p, int k_max,
                                            int n_r, Grading grading,
                                            AngularSymbol symbol = AngularSymbol::Continuum,
                                            int ntheta_full = 0,
                                            double marginal_band_rel = 1e-9);

}  // namespace henon
