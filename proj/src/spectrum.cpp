#include "mee/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mee/detail/root.hpp"
#include "mee/error.hpp"

namespace mee {

Spectrum::Spectrum(std::vector<double> levels, std::vector<std::uint64_t> degeneracies)
    : levels_(std::move(levels)), degeneracies_(std::move(degeneracies)) {
  if (levels_.empty()) {
    throw DomainError("spectrum must contain at least one level");
  }
  if (degeneracies_.empty()) {
    degeneracies_.assign(levels_.size(), 1);
  }
  if (degeneracies_.size() != levels_.size()) {
    throw DomainError("degeneracies must match levels in length",
                      {{"levels", levels_.size()}, {"degeneracies", degeneracies_.size()}});
  }
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    if (!std::isfinite(levels_[k])) {
      throw DomainError("spectrum levels must be finite", {{"index", k}});
    }
    if (degeneracies_[k] == 0) {
      throw DomainError("degeneracies must be positive", {{"index", k}});
    }
    dimension_ += degeneracies_[k];
  }
  auto [lo, hi] = std::minmax_element(levels_.begin(), levels_.end());
  min_ = *lo;
  max_ = *hi;
}

Spectrum Spectrum::uniform(std::vector<double> levels, std::uint64_t copies) {
  std::vector<std::uint64_t> deg(levels.size(), copies);
  return Spectrum(std::move(levels), std::move(deg));
}

std::vector<double> Spectrum::expanded() const {
  std::vector<double> out;
  out.reserve(dimension_);
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    out.insert(out.end(), degeneracies_[k], levels_[k]);
  }
  return out;
}

Spectrum Spectrum::negated() const {
  std::vector<double> neg(levels_.size());
  std::transform(levels_.begin(), levels_.end(), neg.begin(), [](double e) { return -e; });
  return Spectrum(std::move(neg), degeneracies_);
}

namespace {

template <class F>
double weighted_mean(const Spectrum& spectrum, F&& f) {
  long double sum = 0.0L;
  const auto levels = spectrum.levels();
  const auto deg = spectrum.degeneracies();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    sum += static_cast<long double>(deg[k]) * static_cast<long double>(f(levels[k]));
  }
  return static_cast<double>(sum / static_cast<long double>(spectrum.dimension()));
}

}  // namespace

Means compute_means(const Spectrum& spectrum) {
  Means m;
  m.n = spectrum.dimension();
  m.e_min = spectrum.min();
  m.e_max = spectrum.max();
  m.e_arith = weighted_mean(spectrum, [](double e) { return e; });
  if (spectrum.all_equal()) {
    m.e_arith = spectrum.min();
  }
  if (spectrum.min() > 0.0) {
    if (spectrum.all_equal()) {
      m.e_harm = m.e_quad = spectrum.min();
    } else {
      const auto inv = inverse_moments(spectrum, 0.0);
      m.e_harm = 1.0 / inv.first;
      m.e_quad = 1.0 / std::sqrt(inv.second);
    }
  }
  return m;
}

InverseMoments inverse_moments(const Spectrum& spectrum, double shift) {
  long double first = 0.0L;
  long double second = 0.0L;
  const auto levels = spectrum.levels();
  const auto deg = spectrum.degeneracies();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const long double inv = 1.0L / (static_cast<long double>(levels[k]) + shift);
    first += deg[k] * inv;
    second += deg[k] * inv * inv;
  }
  const auto n = static_cast<long double>(spectrum.dimension());
  return {static_cast<double>(first / n), static_cast<double>(second / n)};
}

EnergyFrame::EnergyFrame(Spectrum base, double energy, double shift, std::optional<double> dimension)
    : base_(std::move(base)),
      energy_(energy),
      shift_(shift),
      dimension_(dimension.value_or(static_cast<double>(base_.dimension()))) {
  if (!std::isfinite(energy_) || !std::isfinite(shift_)) {
    throw DomainError("energy frame requires finite energy and shift");
  }
  if (!(dimension_ >= 1.0) || !std::isfinite(dimension_)) {
    throw DomainError("energy frame dimension must be a finite value >= 1", {{"dimension", dimension_}});
  }
  if (!(shifted_min() > 0.0) || !(shifted_energy() > 0.0)) {
    throw DomainError("shifted levels and shifted energy must be strictly positive",
                      {{"shifted_min", shifted_min()}, {"shifted_energy", shifted_energy()}});
  }
}

double EnergyFrame::shifted_harmonic() const { return 1.0 / inverse_moments(base_, shift_).first; }

double EnergyFrame::shifted_quadratic() const {
  return 1.0 / std::sqrt(inverse_moments(base_, shift_).second);
}

namespace {

// Root of  multiplier * E_H({E_k + x}) - (E + x), which is strictly
// increasing in x for multiplier >= 1 and non-constant spectra:
// d/dx E_H = mean(1/E'^2) / mean(1/E')^2 >= 1 with equality only for
// equal levels.
double solve_scaled_shift(const Spectrum& spectrum, double energy, double multiplier, double tol) {
  const double spread = spectrum.max() - spectrum.min();
  const double lo = -spectrum.min() + 1e-14 * spread;

  auto eval = [&](double x) -> std::pair<double, double> {
    const auto inv = inverse_moments(spectrum, x);
    const double value = multiplier / inv.first - (energy + x);
    const double slope = multiplier * inv.second / (inv.first * inv.first) - 1.0;
    return {value, slope};
  };

  const double f_lo = eval(lo).first;
  if (f_lo > 0.0) {
    throw InfeasibleError("no sign change in shift bracket: energy too close to the minimum level",
                          {{"lower", lo}, {"residual_lower", f_lo}, {"energy", energy}});
  }
  double step = std::max({spread, std::abs(energy), 1.0});
  double hi = lo + step;
  double f_hi = eval(hi).first;
  int expansions = 0;
  while (!(f_hi > 0.0)) {
    if (++expansions > 1100 || !std::isfinite(hi)) {
      throw InfeasibleError("no sign change in shift bracket",
                            {{"lower", lo}, {"upper", hi}, {"residual_lower", f_lo}, {"residual_upper", f_hi}});
    }
    step *= 2.0;
    hi = lo + step;
    f_hi = eval(hi).first;
  }

  auto accept = [&](double x, double fx) { return std::abs(fx) <= tol * std::abs(energy + x); };
  const auto root = detail::increasing_root(eval, accept, lo, hi, 500);
  if (!root.converged) {
    throw NumericalError("shift solver did not reach tolerance",
                         {{"shift", root.x}, {"residual", root.residual}, {"iterations", root.iterations}});
  }
  return root.x;
}

}  // namespace

double harmonic_shift_solve(const Spectrum& spectrum, double energy, double tol) {
  if (spectrum.all_equal()) {
    if (energy == spectrum.min()) {
      return 0.0;
    }
    throw DomainError("all levels are equal and the energy differs from them",
                      {{"level", spectrum.min()}, {"energy", energy}});
  }
  const double e_arith = compute_means(spectrum).e_arith;
  if (!(energy >= spectrum.min() && energy < e_arith)) {
    throw DomainError("harmonic shift needs E_min <= E < E_A",
                      {{"energy", energy}, {"e_min", spectrum.min()}, {"e_arith", e_arith}});
  }
  if (energy == spectrum.min()) {
    return -spectrum.min();
  }
  return solve_scaled_shift(spectrum, energy, 1.0, tol);
}

EnergyFrame concentration_shift_solve(const Spectrum& spectrum, double energy, double epsilon, double tol,
                                      std::optional<double> dimension) {
  if (!(epsilon > 0.0)) {
    throw DomainError("epsilon must be positive", {{"epsilon", epsilon}});
  }
  const double n = dimension.value_or(static_cast<double>(spectrum.dimension()));
  if (!(n >= 1.0)) {
    throw DomainError("dimension must be >= 1", {{"dimension", n}});
  }
  if (spectrum.all_equal()) {
    throw InfeasibleError("no energy shift exists for a spectrum with all levels equal");
  }
  const double multiplier = (1.0 + 1.0 / n) * (1.0 + epsilon / std::sqrt(n));
  const double s = solve_scaled_shift(spectrum, energy, multiplier, tol);
  return EnergyFrame(spectrum, energy, s, n);
}

EnergyFrame harmonic_frame(const Spectrum& spectrum, double energy, double tol) {
  return EnergyFrame(spectrum, energy, harmonic_shift_solve(spectrum, energy, tol));
}

}  // namespace mee
