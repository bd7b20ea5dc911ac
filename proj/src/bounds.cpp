#include "mee/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mee/error.hpp"

namespace mee {

WindowCheck check_energy_window(const Spectrum& spectrum, double energy, std::optional<double> dimension) {
  const double n = dimension.value_or(static_cast<double>(spectrum.dimension()));
  if (!(n >= 2.0)) {
    throw DomainError("energy window needs n >= 2", {{"dimension", n}});
  }
  const double e_arith = compute_means(spectrum).e_arith;
  const double spread = spectrum.max() - spectrum.min();
  const double margin = e_arith - std::numbers::pi * spread / std::sqrt(2.0 * (n - 1.0)) - energy;
  return {margin >= 0.0 && energy > spectrum.min(), margin};
}

std::pair<Spectrum, double> flip_for_high_energy(const Spectrum& spectrum, double energy) {
  const double e_arith = compute_means(spectrum).e_arith;
  if (!(energy > e_arith && energy < spectrum.max())) {
    throw DomainError("flip needs E_A < E < E_max",
                      {{"energy", energy}, {"e_arith", e_arith}, {"e_max", spectrum.max()}});
  }
  return {spectrum.negated(), -energy};
}

ConcentrationConstants constants_for(const Spectrum& spectrum, double energy, double epsilon,
                                     std::optional<double> dimension, double tol) {
  EnergyFrame frame = concentration_shift_solve(spectrum, energy, epsilon, tol, dimension);
  const double ep = frame.shifted_energy();
  const double eq = frame.shifted_quadratic();
  const double ratio = ep / (epsilon * eq);
  const double denominator = 1.0 - ratio * ratio;
  if (!(denominator > 0.0)) {
    throw InfeasibleError("epsilon too small: constant a would not be positive",
                          {{"epsilon", epsilon}, {"min_epsilon", ep / eq}, {"shift", frame.shift()}});
  }
  ConcentrationConstants k{frame, epsilon, 0.0, 0.0, frame.dimension(), eq, {}};
  k.c = 3.0 * frame.shifted_min() / (32.0 * ep);
  k.a = 3040.0 * frame.shifted_max() * frame.shifted_max() / (ep * ep * denominator);
  k.window = check_energy_window(spectrum, energy, frame.dimension());
  return k;
}

double log_tail_bound(const ConcentrationConstants& k, double t) {
  const double gap = t - 1.0 / (4.0 * k.n);
  return std::log(k.a) + 1.5 * std::log(k.n) - k.c * k.n * gap * gap + 2.0 * k.epsilon * std::sqrt(k.n);
}

double tail_bound(const ConcentrationConstants& k, double t, double lipschitz) {
  if (!(t >= 0.0)) {
    throw DomainError("tail threshold t must be non-negative", {{"t", t}});
  }
  if (!(lipschitz > 0.0)) {
    throw DomainError("Lipschitz constant must be positive", {{"lipschitz", lipschitz}});
  }
  return std::exp(log_tail_bound(k, t));
}

std::vector<double> default_epsilon_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 16; ++i) {
    grid.push_back(0.5 * i);
  }
  return grid;
}

ConcentrationConstants optimize_epsilon(const Spectrum& spectrum, double energy, double t,
                                        std::span<const double> grid, std::optional<double> dimension) {
  if (grid.empty()) {
    throw DomainError("epsilon grid must not be empty");
  }
  std::optional<ConcentrationConstants> best;
  double best_log = std::numeric_limits<double>::infinity();
  nlohmann::json rejected = nlohmann::json::array();
  for (double eps : grid) {
    try {
      auto k = constants_for(spectrum, energy, eps, dimension);
      const double lb = log_tail_bound(k, t);
      if (!best || lb < best_log) {
        best_log = lb;
        best = std::move(k);
      }
    } catch (const InfeasibleError& e) {
      rejected.push_back({{"epsilon", eps}, {"reason", e.what()}, {"details", e.details()}});
    } catch (const DomainError& e) {
      rejected.push_back({{"epsilon", eps}, {"reason", e.what()}, {"details", e.details()}});
    }
  }
  if (!best) {
    throw InfeasibleError("no feasible epsilon on the grid", {{"rejected", rejected}});
  }
  return *best;
}

double finite_size_term(const ConcentrationConstants& k) {
  return k.epsilon / std::sqrt(k.n) + (std::log(2.0 * k.a) + 1.5 * std::log(k.n)) / (2.0 * k.n);
}

double median_window(const ConcentrationConstants& k, double lipschitz_n) {
  const double ratio = k.frame.shifted_energy() / k.frame.shifted_min();
  return lipschitz_n * (3.0 / (8.0 * k.n) + 15.0 * std::sqrt(ratio * finite_size_term(k)));
}

double Ellipsoid::max_radius() const { return *std::max_element(radii.begin(), radii.end()); }

std::vector<double> Ellipsoid::expanded_radii() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    out.insert(out.end(), multiplicities[k], radii[k]);
  }
  return out;
}

Ellipsoid ellipsoid_for(const EnergyFrame& frame) {
  const double n = frame.dimension();
  const double scale = frame.shifted_energy() * (1.0 + 1.0 / (2.0 * n));
  Ellipsoid e;
  const auto deg = frame.base().degeneracies();
  for (std::size_t k = 0; k < frame.base().distinct(); ++k) {
    e.radii.push_back(std::sqrt(scale / frame.shifted_level(k)));
    e.multiplicities.push_back(deg[k]);
  }
  return e;
}

}  // namespace mee
