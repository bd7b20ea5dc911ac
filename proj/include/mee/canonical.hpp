#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mee/bounds.hpp"
#include "mee/density_matrix.hpp"
#include "mee/spectrum.hpp"

namespace mee {

/// Non-interacting H = H_A ⊗ 1 + 1 ⊗ H_B given by the two local spectra.
class BipartiteSpectrum {
 public:
  BipartiteSpectrum(std::vector<double> levels_a, std::vector<double> levels_b);

  std::span<const double> levels_a() const noexcept { return levels_a_; }
  std::span<const double> levels_b() const noexcept { return levels_b_; }
  std::size_t dim_a() const noexcept { return levels_a_.size(); }
  std::size_t dim_b() const noexcept { return levels_b_.size(); }

  /// All sums E_k^A + E_l^B in A-major order; runs of equal consecutive
  /// values are stored as one level with a degeneracy, so the expansion
  /// order still matches the tensor-product basis.
  Spectrum combined() const;

 private:
  std::vector<double> levels_a_;
  std::vector<double> levels_b_;
};

/// Canonical matrix from an already solved frame:
///   (1 + 1/(2n))/(n+1) · diag_p( Σ_l E'/E'_{pl} ).
/// When frame.dimension() differs from |A||B| each B level counts
/// n/(|A||B|) times.
DensityMatrix rho_c_from_frame(const BipartiteSpectrum& bs, const EnergyFrame& frame);

/// Canonical matrix at the concentration shift for (E, ε).
DensityMatrix rho_c_bipartite(const BipartiteSpectrum& bs, double energy, double epsilon,
                              std::optional<double> dimension = {});

/// n -> ∞ limit: harmonic shift, entries (1/(|A||B|)) Σ_l E'/E'_{pl}.
DensityMatrix rho_c_limit(const BipartiteSpectrum& bs, double energy);

/// Tr ρ_c - 1 = (1 + 1/(2n)) · n/(n+1) · E'/E'_H - 1.
double rho_c_trace_deviation(const EnergyFrame& frame);

/// δ = √(E'/E'_min (1+1/n)) · (3/(8n) + 15 √(E'/E'_min · O(n^{-1/2}))).
double delta_deviation(const ConcentrationConstants& k);

struct ReducedStateTail {
  double threshold = 0.0;  // √8 |A| (t + δ)
  double bound = 0.0;      // |A|(|A|+1) a n^{3/2} exp(-cn(t - 1/(4n))² + 2ε√n)
  double log_bound = 0.0;
};

ReducedStateTail reduced_dm_tail(const ConcentrationConstants& k, std::size_t dim_a, double t, double delta);

/// Maximizer of det ρ subject to Tr ρ = 1 and Tr ρH_A = E: diagonal with
/// λ_i = E'/(|A| E'_i) at the harmonic shift of the local levels.
DensityMatrix detmax_state(std::span<const double> levels_a, double energy, double tol = 1e-12);

/// diag((E-E2)/(E1-E2), (E1-E)/(E1-E2)) for E2 < E < (E1+E2)/2 < E1.
DensityMatrix qubit_canonical(double e1, double e2, double energy);

/// Probability that ‖ψ^A - ρ_c‖₁ >= ε for a qubit A: (1 - ε²/(1-r_z²))^{|B|-1},
/// exactly 0 once ε² >= 1 - r_z².
double qubit_exact_tail(double e1, double e2, double energy, std::size_t dim_b, double epsilon);

/// exp(-ε² (|B|-1)(E1-E2)² / (4(E1-E)(E-E2)))
double qubit_exponential_bound(double e1, double e2, double energy, std::size_t dim_b, double epsilon);

/// c_B (1 - r²)^{|B|-2}, normalized to unit mass over the Bloch ball.
double hall_radial_density(std::size_t dim_b, double r);

}  // namespace mee
