#include "mee/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "mee/error.hpp"
#include "mee/io.hpp"

namespace mee {

namespace {

std::size_t effective_groups(std::size_t count, std::size_t groups) {
  return std::max<std::size_t>(1, std::min(groups, count));
}

double sd_of_mean(const std::vector<double>& estimates) {
  const std::size_t g = estimates.size();
  if (g < 2) return 0.0;
  const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / static_cast<double>(g);
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);
  return std::sqrt(ss / static_cast<double>(g - 1) / static_cast<double>(g));
}

void require_weights(std::span<const double> values, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != values.size()) {
    throw DomainError("weights and values differ in length",
                      {{"values", values.size()}, {"weights", weights.size()}});
  }
}

double unbiased_variance(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  long double mean = 0.0L;
  for (double v : x) mean += v;
  mean /= static_cast<long double>(n);
  long double ss = 0.0L;
  for (double v : x) ss += (v - mean) * (v - mean);
  return static_cast<double>(ss / static_cast<long double>(n - 1));
}

bool same_shift(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

MeanEstimate batch_mean(std::span<const double> values, std::span<const double> weights, std::size_t groups) {
  if (values.empty()) throw DomainError("batch_mean needs at least one value");
  require_weights(values, weights);
  const std::size_t n = values.size();
  const std::size_t g = effective_groups(n, groups);
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

  long double num = 0.0L;
  long double den = 0.0L;
  std::vector<double> estimates;
  estimates.reserve(g);
  for (std::size_t j = 0; j < g; ++j) {
    long double gn = 0.0L;
    long double gd = 0.0L;
    for (std::size_t i = j * n / g; i < (j + 1) * n / g; ++i) {
      gn += w(i) * values[i];
      gd += w(i);
    }
    num += gn;
    den += gd;
    if (gd > 0.0L) estimates.push_back(static_cast<double>(gn / gd));
  }
  if (!(den > 0.0L)) throw DomainError("total weight must be positive");
  return {static_cast<double>(num / den), sd_of_mean(estimates)};
}

MeanEstimate batch_variance(std::span<const double> values, std::size_t groups) {
  if (values.size() < 2) throw DomainError("batch_variance needs at least two values");
  const std::size_t n = values.size();
  const std::size_t g = std::min(groups, n / 2);
  std::vector<double> estimates;
  for (std::size_t j = 0; j < g; ++j) {
    const std::size_t lo = j * n / g;
    const std::size_t hi = (j + 1) * n / g;
    estimates.push_back(unbiased_variance(values.subspan(lo, hi - lo)));
  }
  return {unbiased_variance(values), sd_of_mean(estimates)};
}

double weighted_median(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw DomainError("median of an empty sample");
  require_weights(values, weights);
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  if (weights.empty()) {
    const std::size_t n = values.size();
    const double lo = values[order[(n - 1) / 2]];
    const double hi = values[order[n / 2]];
    return 0.5 * (lo + hi);
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw DomainError("total weight must be positive");
  double acc = 0.0;
  for (std::size_t idx : order) {
    acc += weights[idx];
    if (acc >= 0.5 * total) return values[idx];
  }
  return values[order.back()];
}

DensityMatrix estimate_reduced_dm(const SampleBatch& batch, std::size_t dim_a, std::size_t dim_b) {
  if (batch.size() == 0) throw DomainError("empty batch");
  if (dim_a == 0 || dim_b == 0) throw DomainError("subsystem dimensions must be positive");
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_a), static_cast<Eigen::Index>(dim_a));
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& psi = batch.states[i].amplitudes;
    if (psi.size() != dim_a * dim_b) {
      throw DomainError("state dimension does not match dimA·dimB",
                        {{"state", psi.size()}, {"dim_a", dim_a}, {"dim_b", dim_b}});
    }
    const double w = batch.weight(i);
    sum += w * partial_trace_b(psi, dim_a, dim_b);
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("total weight must be positive");
  Eigen::MatrixXcd avg = sum / total;
  avg = 0.5 * (avg + avg.adjoint()).eval();
  return DensityMatrix(std::move(avg));
}

TailCurve empirical_tail(std::span<const double> values, std::span<const double> weights,
                         std::span<const double> ts) {
  if (values.empty()) throw DomainError("empty sample");
  require_weights(values, weights);
  if (!std::is_sorted(ts.begin(), ts.end())) throw DomainError("t values must be sorted");
  TailCurve curve;
  curve.median = weighted_median(values, weights);
  curve.t.assign(ts.begin(), ts.end());

  // Deviations sorted once; exceedance at t is the weight strictly above t.
  std::vector<std::pair<double, double>> dev(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    dev[i] = {std::abs(values[i] - curve.median), w};
    total += w;
  }
  std::sort(dev.begin(), dev.end());
  std::vector<double> tail(dev.size() + 1, 0.0);
  for (std::size_t i = dev.size(); i-- > 0;) tail[i] = tail[i + 1] + dev[i].second;

  curve.exceedance.reserve(ts.size());
  for (double t : ts) {
    auto it = std::upper_bound(dev.begin(), dev.end(), t,
                               [](double v, const std::pair<double, double>& d) { return v < d.first; });
    curve.exceedance.push_back(tail[static_cast<std::size_t>(it - dev.begin())] / total);
  }
  return curve;
}

TailCurve empirical_tail(const SampleBatch& batch, const std::function<double(std::span<const Amplitude>)>& f,
                         std::span<const double> ts) {
  if (batch.size() == 0) throw DomainError("empty batch");
  std::vector<double> values(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) values[i] = f(batch.states[i].amplitudes);
  std::vector<double> weights;
  if (batch.weights) weights = *batch.weights;
  return empirical_tail(values, weights, ts);
}

ExperimentReport moment_report(std::span<const double> norms, std::span<const double> energies,
                               const EnergyFrame& frame, double sigmas) {
  if (norms.size() != energies.size() || norms.size() < 2) {
    throw DomainError("moment_report needs matching samples (at least two)");
  }
  const double n = frame.dimension();
  const double ep = frame.shifted_energy();
  const double eq = frame.shifted_quadratic();

  ExperimentReport report;
  report.name = "moments";
  report.inputs = {{"spectrum", spectrum_digest(frame.base())},
                   {"energy", frame.energy()},
                   {"shift", frame.shift()},
                   {"n", n},
                   {"count", norms.size()}};

  const auto norm_mean = batch_mean(norms);
  const auto energy_mean = batch_mean(energies);
  const auto energy_var = batch_variance(energies);
  const auto norm_var = batch_variance(norms);
  report.quantities.push_back(make_quantity("mean_norm_squared", norm_mean.mean, norm_mean.std_error,
                                            ep / frame.shifted_harmonic(), Check::sigma, sigmas));
  report.quantities.push_back(make_quantity("mean_shifted_energy", energy_mean.mean, energy_mean.std_error, ep,
                                            Check::sigma, sigmas));
  report.quantities.push_back(make_quantity("var_shifted_energy", energy_var.mean, energy_var.std_error,
                                            ep * ep / n, Check::relative, 0.1));
  report.quantities.push_back(make_quantity("var_norm_squared", norm_var.mean, norm_var.std_error,
                                            (ep / eq) * (ep / eq) / n, Check::relative, 0.1,
                                            "(1/n²) Σ (E'/E'_k)²"));
  return report;
}

ExperimentReport moment_report(const SampleBatch& batch, const EnergyFrame& frame, double sigmas) {
  if (batch.meta.mode != SampleMode::gaussian) {
    throw DomainError("moment_report needs a Gaussian-ensemble batch", {{"mode", to_string(batch.meta.mode)}});
  }
  if (batch.meta.shift && !same_shift(*batch.meta.shift, frame.shift())) {
    throw DomainError("batch and frame use different shifts",
                      {{"batch_shift", *batch.meta.shift}, {"frame_shift", frame.shift()}});
  }
  if (batch.meta.energy && *batch.meta.energy != frame.energy()) {
    throw DomainError("batch and frame use different energies",
                      {{"batch_energy", *batch.meta.energy}, {"frame_energy", frame.energy()}});
  }
  const auto& spectrum = frame.base();
  std::vector<double> norms(batch.size());
  std::vector<double> energies(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& psi = batch.states[i].amplitudes;
    if (psi.size() != spectrum.dimension()) {
      throw DomainError("state dimension does not match the frame",
                        {{"state", psi.size()}, {"n", spectrum.dimension()}});
    }
    double norm = 0.0;
    double energy = 0.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < spectrum.distinct(); ++k) {
      const double level = frame.shifted_level(k);
      for (std::uint64_t d = 0; d < spectrum.degeneracies()[k]; ++d, ++idx) {
        const double p = std::norm(psi[idx]);
        norm += p;
        energy += level * p;
      }
    }
    norms[i] = norm;
    energies[i] = energy;
  }
  auto report = moment_report(norms, energies, frame, sigmas);
  report.inputs["seed"] = batch.rng.seed;
  report.inputs["stream"] = batch.rng.stream;
  return report;
}

ExperimentReport run_moment_experiment(const EnergyFrame& frame, std::size_t count, const RngSpec& rng,
                                       unsigned workers, double sigmas) {
  GaussianEnsemble ensemble(frame);
  const auto& spectrum = frame.base();
  std::vector<double> shifted(spectrum.distinct());
  for (std::size_t k = 0; k < shifted.size(); ++k) shifted[k] = frame.shifted_level(k);

  auto pairs = map_samples(ensemble, count, rng, workers, [&](std::span<const Amplitude> psi) {
    double norm = 0.0;
    double energy = 0.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < shifted.size(); ++k) {
      double level_pop = 0.0;
      for (std::uint64_t d = 0; d < spectrum.degeneracies()[k]; ++d) level_pop += std::norm(psi[idx++]);
      norm += level_pop;
      energy += shifted[k] * level_pop;
    }
    return std::array<double, 2>{norm, energy};
  });
  std::vector<double> norms(count);
  std::vector<double> energies(count);
  for (std::size_t i = 0; i < count; ++i) {
    norms[i] = pairs[i][0];
    energies[i] = pairs[i][1];
  }
  auto report = moment_report(norms, energies, frame, sigmas);
  report.inputs["seed"] = rng.seed;
  report.inputs["stream"] = rng.stream;
  return report;
}

ExperimentReport run_reduced_dm_experiment(const BipartiteSpectrum& bs, double energy, double epsilon,
                                           std::size_t count, const RngSpec& rng, unsigned workers,
                                           double sigmas) {
  if (count < 2) throw DomainError("reduced-dm experiment needs at least two samples");
  const Spectrum combined = bs.combined();
  const EnergyFrame frame = harmonic_frame(combined, energy);
  const std::size_t dim_a = bs.dim_a();
  const std::size_t dim_b = bs.dim_b();
  const double n = static_cast<double>(combined.dimension());

  const EnergyFrame concentration = concentration_shift_solve(combined, energy, epsilon);
  const DensityMatrix rho_n = rho_c_from_frame(bs, concentration);
  const DensityMatrix rho_lim = rho_c_limit(bs, energy);

  GaussianEnsemble ensemble(frame);
  auto reduced = map_samples(ensemble, count, rng, workers, [&](std::span<const Amplitude> psi) {
    return partial_trace_b(psi, dim_a, dim_b);
  });

  std::vector<double> deviations(count);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_a), static_cast<Eigen::Index>(dim_a));
  std::vector<std::vector<double>> diag(dim_a, std::vector<double>(count));
  for (std::size_t i = 0; i < count; ++i) {
    deviations[i] = (reduced[i] - rho_n.matrix()).norm();
    sum += reduced[i];
    for (std::size_t a = 0; a < dim_a; ++a) {
      diag[a][i] = reduced[i](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
    }
  }
  const Eigen::MatrixXcd avg = sum / static_cast<double>(count);
  const DensityMatrix estimate(0.5 * (avg + avg.adjoint()));

  ExperimentReport report;
  report.name = "reduced-dm";
  report.inputs = {{"levels_a", std::vector<double>(bs.levels_a().begin(), bs.levels_a().end())},
                   {"levels_b", std::vector<double>(bs.levels_b().begin(), bs.levels_b().end())},
                   {"energy", energy},
                   {"epsilon", epsilon},
                   {"n", combined.dimension()},
                   {"count", count},
                   {"seed", rng.seed},
                   {"stream", rng.stream}};

  const auto dev = batch_mean(deviations);
  std::optional<double> envelope;
  std::string envelope_note;
  try {
    const auto k = constants_for(combined, energy, epsilon);
    envelope = std::sqrt(8.0) * static_cast<double>(dim_a) * delta_deviation(k);
    envelope_note = "√8 |A| δ";
  } catch (const InfeasibleError& e) {
    envelope_note = std::string("no reference: ") + e.what();
  }
  report.quantities.push_back(make_quantity("mean_hs_deviation", dev.mean, dev.std_error, envelope,
                                            envelope ? Check::upper_bound : Check::none, sigmas, envelope_note));

  const double avg_dev = hs_distance(estimate, rho_n);
  report.quantities.push_back(make_quantity("average_state_hs_deviation", avg_dev, std::nullopt, std::nullopt,
                                            Check::none, 0.0, "‖mean ψ^A - ρ_c^(n)‖₂"));
  report.quantities.push_back(make_quantity("limit_hs_deviation", hs_distance(rho_n, rho_lim), std::nullopt,
                                            4.0 / std::sqrt(n), Check::upper_bound, 0.0, "‖ρ_c^(n) - ρ_c‖₂ vs 4/√n"));
  report.quantities.push_back(make_quantity("trace_deviation_rho_c", rho_n.trace() - 1.0, std::nullopt,
                                            rho_c_trace_deviation(concentration), Check::relative, 1e-9,
                                            "Tr ρ_c^(n) - 1"));
  report.quantities.push_back(make_quantity("estimate_trace_error", std::abs(estimate.trace() - 1.0),
                                            std::nullopt, 1e-10, Check::upper_bound, 0.0));
  const Eigen::MatrixXcd anti = avg - avg.adjoint();
  report.quantities.push_back(make_quantity("estimate_hermitian_error", anti.norm(), std::nullopt, 1e-10,
                                            Check::upper_bound, 0.0));
  report.quantities.push_back(make_quantity("estimate_min_eigenvalue", estimate.eigenvalues()(0), std::nullopt,
                                            -1e-10, Check::lower_bound, 0.0));

  Curve table;
  table.columns = {"index", "empirical", "std_error", "rho_c_n", "rho_c_n_normalized", "rho_c_limit"};
  const auto d_n = rho_n.diagonal();
  const double tr_n = rho_n.trace();
  const auto d_lim = rho_lim.diagonal();
  for (std::size_t a = 0; a < dim_a; ++a) {
    const auto e = batch_mean(diag[a]);
    table.rows.push_back({static_cast<double>(a), e.mean, e.std_error, d_n[a], d_n[a] / tr_n, d_lim[a]});
  }
  report.curves["diagonal"] = std::move(table);
  return report;
}

ExperimentReport run_tail_experiment(const Spectrum& spectrum, double energy, std::span<const double> epsilon_grid,
                                     std::span<const double> ts, std::size_t count, const RngSpec& rng,
                                     unsigned workers) {
  if (count == 0) throw DomainError("tail experiment needs samples");
  if (!std::is_sorted(ts.begin(), ts.end())) throw DomainError("t values must be sorted");
  const EnergyFrame frame = harmonic_frame(spectrum, energy);
  GaussianEnsemble ensemble(frame);

  // f = weight of the lowest level in the normalized state; |∇f| <= 2.
  constexpr double kLipschitz = 2.0;
  const auto levels = spectrum.levels();
  const auto deg = spectrum.degeneracies();
  auto values = map_samples(ensemble, count, rng, workers, [&](std::span<const Amplitude> psi) {
    double low = 0.0;
    double total = 0.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      double pop = 0.0;
      for (std::uint64_t d = 0; d < deg[k]; ++d) pop += std::norm(psi[idx++]);
      total += pop;
      if (levels[k] == spectrum.min()) low += pop;
    }
    return low / total;
  });

  std::vector<double> thresholds(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) thresholds[i] = kLipschitz * ts[i];
  const TailCurve curve = empirical_tail(values, {}, thresholds);

  std::vector<ConcentrationConstants> feasible;
  for (double eps : epsilon_grid) {
    try {
      feasible.push_back(constants_for(spectrum, energy, eps));
    } catch (const InfeasibleError&) {
    }
  }

  ExperimentReport report;
  report.name = "tail";
  report.inputs = {{"spectrum", spectrum_digest(spectrum)},
                   {"energy", energy},
                   {"epsilon_grid", std::vector<double>(epsilon_grid.begin(), epsilon_grid.end())},
                   {"lipschitz", kLipschitz},
                   {"count", count},
                   {"seed", rng.seed},
                   {"stream", rng.stream}};
  report.quantities.push_back(
      make_quantity("median", curve.median, std::nullopt, std::nullopt, Check::none, 0.0, "lowest-level weight"));

  Curve out;
  if (feasible.empty()) {
    out.columns = {"t", "threshold", "empirical"};
    for (std::size_t i = 0; i < ts.size(); ++i) out.rows.push_back({ts[i], thresholds[i], curve.exceedance[i]});
    report.quantities.push_back(make_quantity("max_excess_over_bound", 0.0, std::nullopt, std::nullopt,
                                              Check::none, 0.0, "no reference: no feasible epsilon on the grid"));
  } else {
    out.columns = {"t", "threshold", "empirical", "bound_clamped", "log10_bound", "epsilon"};
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      double best_eps = feasible.front().epsilon;
      for (const auto& k : feasible) {
        const double lb = log_tail_bound(k, ts[i]);
        if (lb < best) {
          best = lb;
          best_eps = k.epsilon;
        }
      }
      const double clamped = std::min(1.0, std::exp(best));
      worst = std::max(worst, curve.exceedance[i] - clamped);
      out.rows.push_back({ts[i], thresholds[i], curve.exceedance[i], clamped, best / std::log(10.0), best_eps});
    }
    report.quantities.push_back(make_quantity("max_excess_over_bound", worst, std::nullopt, 0.0,
                                              Check::upper_bound, 0.0, "empirical - min(1, bound)"));
    const auto window = check_energy_window(spectrum, energy);
    report.quantities.push_back(make_quantity("window_margin", window.margin, std::nullopt, std::nullopt,
                                              Check::none, 0.0,
                                              window.ok ? "inside the proven energy window"
                                                        : "outside the proven energy window"));
  }
  report.curves["tail"] = std::move(out);
  return report;
}

Spectrum spin_spectrum(int m) {
  if (m < 1 || m > 30) throw DomainError("spin count must lie in 1..30", {{"m", m}});
  std::vector<double> levels(static_cast<std::size_t>(m) + 1);
  std::vector<std::uint64_t> deg(levels.size());
  std::uint64_t binom = 1;
  for (int k = 0; k <= m; ++k) {
    levels[static_cast<std::size_t>(k)] = k;
    deg[static_cast<std::size_t>(k)] = binom;
    binom = binom * static_cast<std::uint64_t>(m - k) / static_cast<std::uint64_t>(k + 1);
  }
  return Spectrum(std::move(levels), std::move(deg));
}

double binary_entropy(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("binary entropy needs 0 <= γ <= 1", {{"gamma", gamma}});
  if (gamma == 0.0 || gamma == 1.0) return 0.0;
  return -gamma * std::log2(gamma) - (1.0 - gamma) * std::log2(1.0 - gamma);
}

ExperimentReport spin_concentration_probe(const SpinEnsembleSpec& spec, const SpinProbeOptions& options,
                                          const RngSpec& rng) {
  if (!(spec.alpha > 0.0 && spec.alpha < 0.5 && spec.gamma > spec.alpha && spec.gamma < 0.5)) {
    throw DomainError("spin probe needs 0 < α < γ < 1/2", {{"alpha", spec.alpha}, {"gamma", spec.gamma}});
  }
  if (spec.m > 12) {
    throw DomainError("oracle sampling of the spin manifold is capped at m = 12", {{"m", spec.m}});
  }
  const Spectrum spectrum = spin_spectrum(spec.m);
  const double m = spec.m;
  const double n = static_cast<double>(spectrum.dimension());
  const double energy = spec.alpha * m;

  OracleOptions oracle;
  oracle.shell_width = options.shell_width.value_or(default_shell_width(spectrum));
  oracle.count = options.count;
  oracle.max_draws = options.max_draws;
  oracle.proposal = OracleProposal::tilted;
  oracle.keep_states = false;
  oracle.workers = options.workers;
  const OracleRun run = run_oracle(spectrum, energy, oracle, rng);
  if (run.samples.size() < 2) {
    throw InfeasibleError("oracle accepted too few samples", {{"accepted", run.samples.size()},
                                                              {"proposals", run.proposals},
                                                              {"warning", run.warning}});
  }

  const std::size_t levels = spectrum.distinct();
  const std::size_t count = run.samples.size();
  std::vector<double> weights(count);
  std::vector<double> low(count);
  std::vector<double> high(count);
  std::vector<std::vector<double>> pops(levels, std::vector<double>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const auto& s = run.samples[i];
    weights[i] = s.weight;
    for (std::size_t k = 0; k < levels; ++k) {
      pops[k][i] = s.populations[k];
      if (spectrum.levels()[k] < spec.gamma * m) {
        low[i] += s.populations[k];
      } else {
        high[i] += s.populations[k];
      }
    }
  }

  ExperimentReport report;
  report.name = "spins";
  report.inputs = {{"m", spec.m},
                   {"alpha", spec.alpha},
                   {"gamma", spec.gamma},
                   {"n", spectrum.dimension()},
                   {"energy", energy},
                   {"shell_width", oracle.shell_width},
                   {"count", options.count},
                   {"max_draws", options.max_draws},
                   {"proposal", "tilted"},
                   {"seed", rng.seed},
                   {"stream", rng.stream}};

  const double floor = 1.0 - spec.alpha / spec.gamma;
  const auto l = batch_mean(low, weights);
  const auto r = batch_mean(high, weights);
  std::vector<double> sum(count);
  for (std::size_t i = 0; i < count; ++i) sum[i] = low[i] + high[i];
  const auto lr = batch_mean(sum, weights);
  report.quantities.push_back(make_quantity("L", l.mean, l.std_error, floor, Check::lower_bound, options.sigmas,
                                            "Σ_{E_i < γm} E|ψ_i|² vs 1 - α/γ"));
  report.quantities.push_back(make_quantity("R", r.mean, r.std_error, std::nullopt, Check::none, 0.0));
  report.quantities.push_back(make_quantity("L_plus_R", lr.mean, std::max(l.std_error, r.std_error), 1.0,
                                            Check::sigma, options.sigmas));

  double low_count = 0.0;
  for (std::size_t k = 0; k < levels; ++k) {
    if (spectrum.levels()[k] < spec.gamma * m) low_count += static_cast<double>(spectrum.degeneracies()[k]);
  }
  const double h = binary_entropy(spec.gamma);
  const double entropy_bound = std::exp2(m * h + std::log2(m));
  report.quantities.push_back(make_quantity("low_level_count", low_count, std::nullopt, entropy_bound,
                                            Check::upper_bound, 0.0, "2^{mH(γ) + log₂ m}"));
  report.quantities.push_back(make_quantity("binary_entropy", h, std::nullopt, std::nullopt, Check::none, 0.0));
  report.quantities.push_back(make_quantity("kappa_ceiling_per_b",
                                            2.0 * std::pow(n, h + std::log2(m) / m) / floor, std::nullopt,
                                            std::nullopt, Check::none, 0.0,
                                            "κ(n) <= 2b n^{H(γ)+log₂m/m}/(1-α/γ), per unit b"));

  // The constants need E'/(εE'_Q) < 1; pick the grid point closest to that.
  const double c_reference = 3.0 / 32.0 * std::exp2(-m);
  std::optional<EnergyFrame> best;
  double best_eps = 0.0;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (double eps : default_epsilon_grid()) {
    EnergyFrame f = concentration_shift_solve(spectrum, energy, eps);
    const double ratio = f.shifted_energy() / (eps * f.shifted_quadratic());
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best_eps = eps;
      best.emplace(std::move(f));
    }
  }
  const double c_conc = 3.0 * best->shifted_min() / (32.0 * best->shifted_energy());
  report.quantities.push_back(make_quantity("c", c_conc, std::nullopt, c_reference, Check::factor, 2.0,
                                            "3E'_min/(32E') at ε = " + std::to_string(best_eps).substr(0, 4)));
  report.quantities.push_back(make_quantity("feasibility_ratio", best_ratio, std::nullopt, std::nullopt,
                                            Check::none, 0.0, "E'/(εE'_Q); a > 0 needs < 1"));
  const EnergyFrame harmonic = harmonic_frame(spectrum, energy);
  report.quantities.push_back(make_quantity("c_harmonic_shift",
                                            3.0 * harmonic.shifted_min() / (32.0 * harmonic.shifted_energy()),
                                            std::nullopt, c_reference, Check::none, 0.0));
  report.quantities.push_back(make_quantity("acceptance_rate", run.acceptance_rate, std::nullopt, std::nullopt,
                                            Check::none, 0.0, run.warning));
  report.quantities.push_back(make_quantity("accepted", static_cast<double>(count), std::nullopt,
                                            static_cast<double>(options.count), Check::lower_bound, 0.0));

  Curve variances;
  variances.columns = {"level", "degeneracy", "coordinate_variance", "std_error"};
  for (std::size_t k = 0; k < levels; ++k) {
    const auto e = batch_mean(pops[k], weights);
    const double d = static_cast<double>(spectrum.degeneracies()[k]);
    // E|Re ψ_i|² = E|ψ_i|²/2 for each coordinate of the level.
    variances.rows.push_back({spectrum.levels()[k], d, e.mean / (2.0 * d), e.std_error / (2.0 * d)});
  }
  report.curves["coordinate_variance"] = std::move(variances);
  return report;
}

}  // namespace mee
