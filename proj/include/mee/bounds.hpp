#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mee/spectrum.hpp"

namespace mee {

struct WindowCheck {
  bool ok = false;
  double margin = 0.0;  // E_A - π(E_max - E_min)/√(2(n-1)) - E
};

/// Energy window of the concentration bound: E_min < E <= E_A - π ΔE/√(2(n-1)).
WindowCheck check_energy_window(const Spectrum& spectrum, double energy,
                                std::optional<double> dimension = {});

/// H -> -H, E -> -E for energies above the arithmetic mean.
std::pair<Spectrum, double> flip_for_high_energy(const Spectrum& spectrum, double energy);

/// Constants a, c, ε of the tail bound together with the frame they were
/// computed in. a > 0 always holds for a constructed value.
struct ConcentrationConstants {
  EnergyFrame frame;
  double epsilon = 0.0;
  double a = 0.0;
  double c = 0.0;
  double n = 0.0;
  double shifted_quadratic = 0.0;  // E'_Q
  WindowCheck window;              // the bound is only proven when window.ok
};

/// Solves the concentration shift for `epsilon` and evaluates
/// c = 3E'_min/(32E') and a = 3040 E'_max² / (E'²(1 - E'²/(ε²E'_Q²))).
/// Throws InfeasibleError (details.min_epsilon = E'/E'_Q) when a <= 0.
ConcentrationConstants constants_for(const Spectrum& spectrum, double energy, double epsilon,
                                     std::optional<double> dimension = {}, double tol = 1e-12);

/// Natural log of  a n^{3/2} exp(-cn(t - 1/(4n))² + 2ε√n).
double log_tail_bound(const ConcentrationConstants& k, double t);

/// Raw (unclamped) probability bound for |f - median| > λt.
/// λ only enters through the event; it is validated but does not change the value.
double tail_bound(const ConcentrationConstants& k, double t, double lipschitz);

std::vector<double> default_epsilon_grid();

/// Feasible grid point minimizing the bound at t (first one on ties).
ConcentrationConstants optimize_epsilon(const Spectrum& spectrum, double energy, double t,
                                        std::span<const double> grid,
                                        std::optional<double> dimension = {});

/// ε/√n + ln(2 a n^{3/2})/(2n)
double finite_size_term(const ConcentrationConstants& k);

/// Bound on |median - E_N f| for a λ_N-Lipschitz f on the full ellipsoid.
double median_window(const ConcentrationConstants& k, double lipschitz_n);

/// Full ellipsoid <z|H'|z> <= E'(1 + 1/(2n)); one radius per distinct level.
struct Ellipsoid {
  std::vector<double> radii;
  std::vector<std::uint64_t> multiplicities;

  double max_radius() const;
  std::vector<double> expanded_radii() const;
};

Ellipsoid ellipsoid_for(const EnergyFrame& frame);

}  // namespace mee
