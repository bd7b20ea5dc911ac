#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mee/bounds.hpp"
#include "mee/canonical.hpp"
#include "mee/density_matrix.hpp"
#include "mee/report.hpp"
#include "mee/sampler.hpp"
#include "mee/spectrum.hpp"

namespace mee {

inline constexpr std::size_t kBatchMeanGroups = 32;

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// (Weighted) mean with a batch-means standard error over `groups`
/// contiguous sub-batches.
MeanEstimate batch_mean(std::span<const double> values, std::span<const double> weights = {},
                        std::size_t groups = kBatchMeanGroups);

/// Unbiased sample variance and its batch-means standard error.
MeanEstimate batch_variance(std::span<const double> values, std::size_t groups = kBatchMeanGroups);

double weighted_median(std::span<const double> values, std::span<const double> weights = {});

/// Weighted average of Tr_B of each normalized sample.
DensityMatrix estimate_reduced_dm(const SampleBatch& batch, std::size_t dim_a, std::size_t dim_b);

struct TailCurve {
  double median = 0.0;
  std::vector<double> t;
  std::vector<double> exceedance;  // weighted frequency of |f - median| > t
};

TailCurve empirical_tail(std::span<const double> values, std::span<const double> weights,
                         std::span<const double> ts);
TailCurve empirical_tail(const SampleBatch& batch, const std::function<double(std::span<const Amplitude>)>& f,
                         std::span<const double> ts);

/// Means and variances of ‖ψ‖² and <ψ|H'|ψ> against their closed forms.
ExperimentReport moment_report(std::span<const double> norms, std::span<const double> energies,
                               const EnergyFrame& frame, double sigmas = 5.0);
ExperimentReport moment_report(const SampleBatch& batch, const EnergyFrame& frame, double sigmas = 5.0);

/// Streams `count` Gaussian-ensemble samples through moment_report.
ExperimentReport run_moment_experiment(const EnergyFrame& frame, std::size_t count, const RngSpec& rng,
                                       unsigned workers = 1, double sigmas = 5.0);

/// Gaussian-ensemble reduced states of A ⊗ B against the canonical matrix.
ExperimentReport run_reduced_dm_experiment(const BipartiteSpectrum& bs, double energy, double epsilon,
                                           std::size_t count, const RngSpec& rng, unsigned workers = 1,
                                           double sigmas = 5.0);

/// Empirical tail of the lowest-level population (2-Lipschitz) against the
/// concentration bound minimized over `epsilon_grid` at each t.
ExperimentReport run_tail_experiment(const Spectrum& spectrum, double energy, std::span<const double> epsilon_grid,
                                     std::span<const double> ts, std::size_t count, const RngSpec& rng,
                                     unsigned workers = 1);

/// m spins with levels {0, 1}: levels 0..m with degeneracy C(m, k).
Spectrum spin_spectrum(int m);

/// -γ log₂ γ - (1-γ) log₂(1-γ), with H(0) = H(1) = 0.
double binary_entropy(double gamma);

struct SpinEnsembleSpec {
  int m = 10;
  double alpha = 0.3;
  double gamma = 0.4;
};

struct SpinProbeOptions {
  std::size_t count = 10000;
  std::size_t max_draws = 100000000;
  std::optional<double> shell_width;  // default_shell_width of the spin spectrum
  unsigned workers = 1;
  double sigmas = 5.0;
};

ExperimentReport spin_concentration_probe(const SpinEnsembleSpec& spec, const SpinProbeOptions& options,
                                          const RngSpec& rng);

}  // namespace mee
