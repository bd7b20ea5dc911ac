#include "mee/canonical.hpp"

#include <cmath>
#include <numbers>

#include "mee/error.hpp"

namespace mee {

BipartiteSpectrum::BipartiteSpectrum(std::vector<double> levels_a, std::vector<double> levels_b)
    : levels_a_(std::move(levels_a)), levels_b_(std::move(levels_b)) {
  if (levels_a_.empty() || levels_b_.empty()) {
    throw DomainError("both local spectra must be non-empty");
  }
  for (double e : levels_a_) {
    if (!std::isfinite(e)) throw DomainError("levels_a must be finite");
  }
  for (double e : levels_b_) {
    if (!std::isfinite(e)) throw DomainError("levels_b must be finite");
  }
}

Spectrum BipartiteSpectrum::combined() const {
  std::vector<double> levels;
  std::vector<std::uint64_t> deg;
  for (double ea : levels_a_) {
    for (double eb : levels_b_) {
      const double e = ea + eb;
      if (!levels.empty() && levels.back() == e) {
        ++deg.back();
      } else {
        levels.push_back(e);
        deg.push_back(1);
      }
    }
  }
  return Spectrum(std::move(levels), std::move(deg));
}

namespace {

std::vector<double> inverse_row_sums(const BipartiteSpectrum& bs, double shift, double shifted_energy) {
  std::vector<double> sums(bs.dim_a(), 0.0);
  for (std::size_t p = 0; p < bs.dim_a(); ++p) {
    long double acc = 0.0L;
    for (double eb : bs.levels_b()) {
      acc += 1.0L / (static_cast<long double>(bs.levels_a()[p]) + eb + shift);
    }
    sums[p] = static_cast<double>(acc * shifted_energy);
  }
  return sums;
}

}  // namespace

DensityMatrix rho_c_from_frame(const BipartiteSpectrum& bs, const EnergyFrame& frame) {
  const double n = frame.dimension();
  const double replication = n / static_cast<double>(bs.dim_a() * bs.dim_b());
  const double prefactor = (1.0 + 1.0 / (2.0 * n)) / (n + 1.0) * replication;
  auto diag = inverse_row_sums(bs, frame.shift(), frame.shifted_energy());
  for (double& d : diag) {
    d *= prefactor;
  }
  return DensityMatrix::from_diagonal(diag);
}

DensityMatrix rho_c_bipartite(const BipartiteSpectrum& bs, double energy, double epsilon,
                              std::optional<double> dimension) {
  const auto frame = concentration_shift_solve(bs.combined(), energy, epsilon, 1e-12, dimension);
  return rho_c_from_frame(bs, frame);
}

DensityMatrix rho_c_limit(const BipartiteSpectrum& bs, double energy) {
  const auto frame = harmonic_frame(bs.combined(), energy);
  auto diag = inverse_row_sums(bs, frame.shift(), frame.shifted_energy());
  const double scale = 1.0 / static_cast<double>(bs.dim_a() * bs.dim_b());
  for (double& d : diag) {
    d *= scale;
  }
  return DensityMatrix::from_diagonal(diag);
}

double rho_c_trace_deviation(const EnergyFrame& frame) {
  const double n = frame.dimension();
  return (1.0 + 1.0 / (2.0 * n)) * (n / (n + 1.0)) * (frame.shifted_energy() / frame.shifted_harmonic()) - 1.0;
}

double delta_deviation(const ConcentrationConstants& k) {
  const double ratio = k.frame.shifted_energy() / k.frame.shifted_min();
  return std::sqrt(ratio * (1.0 + 1.0 / k.n)) *
         (3.0 / (8.0 * k.n) + 15.0 * std::sqrt(ratio * finite_size_term(k)));
}

ReducedStateTail reduced_dm_tail(const ConcentrationConstants& k, std::size_t dim_a, double t, double delta) {
  if (!(t > 0.0)) {
    throw DomainError("t must be positive", {{"t", t}});
  }
  if (dim_a == 0) {
    throw DomainError("|A| must be positive");
  }
  const double da = static_cast<double>(dim_a);
  ReducedStateTail out;
  out.threshold = std::sqrt(8.0) * da * (t + delta);
  out.log_bound = std::log(da * (da + 1.0)) + log_tail_bound(k, t);
  out.bound = std::exp(out.log_bound);
  return out;
}

DensityMatrix detmax_state(std::span<const double> levels_a, double energy, double tol) {
  const Spectrum local(std::vector<double>(levels_a.begin(), levels_a.end()));
  if (local.all_equal()) {
    throw DomainError("determinant maximizer needs at least two distinct levels");
  }
  if (!(energy > local.min() && energy < local.max())) {
    throw DomainError("energy must lie strictly between the smallest and largest level",
                      {{"energy", energy}, {"e_min", local.min()}, {"e_max", local.max()}});
  }
  const double dim = static_cast<double>(levels_a.size());
  const double e_arith = compute_means(local).e_arith;
  std::vector<double> lambda(levels_a.size(), 1.0 / dim);
  if (energy != e_arith) {
    // Above the arithmetic mean the multiplier flips sign; solve for -H.
    const double sign = energy < e_arith ? 1.0 : -1.0;
    const Spectrum oriented = sign > 0 ? local : local.negated();
    const double shift = harmonic_shift_solve(oriented, sign * energy, tol);
    const double shifted_energy = sign * energy + shift;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      lambda[i] = shifted_energy / (dim * (sign * levels_a[i] + shift));
    }
  }
  long double total = 0.0L;
  long double mean_energy = 0.0L;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    total += lambda[i];
    mean_energy += static_cast<long double>(lambda[i]) * levels_a[i];
  }
  const double scale = std::max(1.0, std::abs(energy));
  if (std::abs(static_cast<double>(total) - 1.0) > 1e3 * tol ||
      std::abs(static_cast<double>(mean_energy) - energy) > 1e3 * tol * scale) {
    throw NumericalError("determinant maximizer violates its constraints",
                         {{"trace", static_cast<double>(total)}, {"energy", static_cast<double>(mean_energy)}});
  }
  return DensityMatrix::from_diagonal(lambda);
}

namespace {

void check_qubit_order(double e1, double e2, double energy) {
  if (!(e2 < energy && energy < 0.5 * (e1 + e2) && 0.5 * (e1 + e2) < e1)) {
    throw DomainError("qubit formulas need E2 < E < (E1+E2)/2 < E1",
                      {{"e1", e1}, {"e2", e2}, {"energy", energy}});
  }
}

double bloch_disc_radius_sq(double e1, double e2, double energy) {
  const double gap = e1 - e2;
  return 4.0 * (e1 - energy) * (energy - e2) / (gap * gap);
}

}  // namespace

DensityMatrix qubit_canonical(double e1, double e2, double energy) {
  check_qubit_order(e1, e2, energy);
  const double gap = e1 - e2;
  const std::vector<double> d{(energy - e2) / gap, (e1 - energy) / gap};
  return DensityMatrix::from_diagonal(d);
}

double qubit_exact_tail(double e1, double e2, double energy, std::size_t dim_b, double epsilon) {
  check_qubit_order(e1, e2, energy);
  if (dim_b < 2 || !(epsilon >= 0.0)) {
    throw DomainError("qubit tail needs |B| >= 2 and ε >= 0", {{"dim_b", dim_b}, {"epsilon", epsilon}});
  }
  const double x = epsilon * epsilon / bloch_disc_radius_sq(e1, e2, energy);
  if (x >= 1.0) {
    return 0.0;
  }
  return std::exp(static_cast<double>(dim_b - 1) * std::log1p(-x));
}

double qubit_exponential_bound(double e1, double e2, double energy, std::size_t dim_b, double epsilon) {
  check_qubit_order(e1, e2, energy);
  if (dim_b < 2 || !(epsilon >= 0.0)) {
    throw DomainError("qubit tail needs |B| >= 2 and ε >= 0", {{"dim_b", dim_b}, {"epsilon", epsilon}});
  }
  const double gap = e1 - e2;
  return std::exp(-epsilon * epsilon * static_cast<double>(dim_b - 1) * gap * gap /
                  (4.0 * (e1 - energy) * (energy - e2)));
}

double hall_radial_density(std::size_t dim_b, double r) {
  if (dim_b < 2) {
    throw DomainError("Hall density needs |B| >= 2", {{"dim_b", dim_b}});
  }
  if (!(r >= 0.0 && r <= 1.0)) {
    throw DomainError("radius must lie in [0, 1]", {{"r", r}});
  }
  // ∫_ball c (1-r²)^{B-2} dx = 2π c · Beta(3/2, B-1)
  const double b = static_cast<double>(dim_b);
  const double log_beta = std::lgamma(1.5) + std::lgamma(b - 1.0) - std::lgamma(b + 0.5);
  const double c = std::exp(-log_beta) / (2.0 * std::numbers::pi);
  if (dim_b == 2) {
    return c;
  }
  return c * std::pow(1.0 - r * r, b - 2.0);
}

}  // namespace mee
