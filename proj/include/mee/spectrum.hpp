#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mee {

/// Finite list of real energy levels with positive integer degeneracies.
///
/// Degeneracies are stored, never expanded, for every mean computation.
/// `expanded()` repeats each level in order, so the k-th expanded entry is
/// the k-th basis vector of the Hilbert space.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> levels, std::vector<std::uint64_t> degeneracies = {});

  /// Each level repeated `copies` times (e.g. H_A (x) 1_B).
  static Spectrum uniform(std::vector<double> levels, std::uint64_t copies);

  std::span<const double> levels() const noexcept { return levels_; }
  std::span<const std::uint64_t> degeneracies() const noexcept { return degeneracies_; }
  std::size_t distinct() const noexcept { return levels_.size(); }
  std::uint64_t dimension() const noexcept { return dimension_; }

  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  bool all_equal() const noexcept { return min_ == max_; }

  std::vector<double> expanded() const;
  Spectrum negated() const;

  bool operator==(const Spectrum&) const = default;

 private:
  std::vector<double> levels_;
  std::vector<std::uint64_t> degeneracies_;
  std::uint64_t dimension_ = 0;
  double min_ = 0.0;
  double max_ = 0.0;
};

struct Means {
  double e_min = 0.0;
  double e_max = 0.0;
  double e_arith = 0.0;
  std::optional<double> e_harm;  // only when every level is > 0
  std::optional<double> e_quad;  // (mean E_k^-2)^(-1/2), only when every level is > 0
  std::uint64_t n = 0;
};

Means compute_means(const Spectrum& spectrum);

/// Degeneracy-weighted averages of 1/(E_k+x) and 1/(E_k+x)^2.
struct InverseMoments {
  double first = 0.0;
  double second = 0.0;
};
InverseMoments inverse_moments(const Spectrum& spectrum, double shift);

/// A spectrum together with a target energy and an energy offset.
///
/// Holds the shifted quantities E'_k = E_k + s and E' = E + s; construction
/// fails unless all of them are strictly positive. `dimension()` is the
/// Hilbert-space dimension entering the finite-n formulas; it defaults to
/// the spectrum's own dimension but may be set to any real n >= 1, which
/// treats the level weights as fixed fractions of an n-dimensional space.
class EnergyFrame {
 public:
  EnergyFrame(Spectrum base, double energy, double shift, std::optional<double> dimension = {});

  const Spectrum& base() const noexcept { return base_; }
  double energy() const noexcept { return energy_; }
  double shift() const noexcept { return shift_; }
  double dimension() const noexcept { return dimension_; }

  double shifted_energy() const noexcept { return energy_ + shift_; }
  double shifted_level(std::size_t k) const { return base_.levels()[k] + shift_; }
  double shifted_min() const noexcept { return base_.min() + shift_; }
  double shifted_max() const noexcept { return base_.max() + shift_; }
  double shifted_harmonic() const;
  double shifted_quadratic() const;

 private:
  Spectrum base_;
  double energy_;
  double shift_;
  double dimension_;
};

/// Offset Δ with E_H({E_k+Δ}) = E + Δ and E_k + Δ >= 0.
/// Requires E_min <= E < E_A; all-equal spectra are handled without iterating.
double harmonic_shift_solve(const Spectrum& spectrum, double energy, double tol = 1e-12);

/// Offset s with E' = (1+1/n)(1+ε/√n) E'_H(s) and E'_min > 0, the shift
/// behind the concentration constants.
EnergyFrame concentration_shift_solve(const Spectrum& spectrum, double energy, double epsilon,
                                      double tol = 1e-12, std::optional<double> dimension = {});

/// Frame at the pure harmonic shift, where E' = E'_H exactly.
EnergyFrame harmonic_frame(const Spectrum& spectrum, double energy, double tol = 1e-12);

}  // namespace mee
