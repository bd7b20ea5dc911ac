#include "mee/sampler.hpp"

#include <algorithm>
#include <cmath>

#include <boost/random/normal_distribution.hpp>

#include "mee/error.hpp"

namespace mee {

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s;
}

StateVector StateVector::normalized() const {
  const double norm = std::sqrt(norm_squared());
  if (!(norm > 0.0)) {
    throw DomainError("cannot normalize a zero state");
  }
  StateVector out = *this;
  for (auto& a : out.amplitudes) a /= norm;
  return out;
}

const char* to_string(SampleMode mode) {
  switch (mode) {
    case SampleMode::gaussian: return "gaussian";
    case SampleMode::sphere: return "sphere";
    case SampleMode::oracle: return "oracle";
  }
  return "unknown";
}

SampleBatch SampleBatch::normalized() const {
  SampleBatch out = *this;
  for (auto& s : out.states) s = s.normalized();
  out.meta.normalized = true;
  return out;
}

GaussianEnsemble::GaussianEnsemble(const EnergyFrame& frame) {
  const Spectrum& spectrum = frame.base();
  const double ep = frame.shifted_energy();
  const double harmonic = frame.shifted_harmonic();
  if (std::abs(harmonic - ep) > 1e-9 * ep) {
    throw DomainError("Gaussian ensemble needs a frame at the harmonic shift (E'_H = E')",
                      {{"shifted_energy", ep}, {"shifted_harmonic", harmonic}});
  }
  if (frame.dimension() != static_cast<double>(spectrum.dimension())) {
    throw DomainError("Gaussian ensemble needs the frame's own dimension",
                      {{"frame_dimension", frame.dimension()}, {"spectrum_dimension", spectrum.dimension()}});
  }
  dimension_ = spectrum.dimension();
  const double n = static_cast<double>(dimension_);
  for (std::size_t k = 0; k < spectrum.distinct(); ++k) {
    sigma_.push_back(std::sqrt(ep / (2.0 * n * frame.shifted_level(k))));
    runs_.push_back(spectrum.degeneracies()[k]);
  }
}

void GaussianEnsemble::draw(Engine& engine, std::span<Amplitude> out) const {
  boost::random::normal_distribution<double> normal;
  std::size_t i = 0;
  for (std::size_t k = 0; k < runs_.size(); ++k) {
    const double sd = sigma_[k];
    for (std::uint64_t r = 0; r < runs_[k]; ++r, ++i) {
      const double re = normal(engine);
      const double im = normal(engine);
      out[i] = {sd * re, sd * im};
    }
  }
}

SphereEnsemble::SphereEnsemble(std::size_t n) : dimension_(n) {
  if (n == 0) {
    throw DomainError("sphere dimension must be >= 1");
  }
}

void SphereEnsemble::draw(Engine& engine, std::span<Amplitude> out) const {
  boost::random::normal_distribution<double> normal;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    const double re = normal(engine);
    const double im = normal(engine);
    out[i] = {re, im};
    norm2 += re * re + im * im;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < dimension_; ++i) out[i] *= inv;
}

namespace {

template <class Ensemble>
std::vector<StateVector> collect_states(const Ensemble& ensemble, std::size_t count, const RngSpec& rng,
                                        unsigned workers) {
  return map_samples(ensemble, count, rng, workers, [](std::span<const Amplitude> psi) {
    return StateVector{std::vector<Amplitude>(psi.begin(), psi.end())};
  });
}

}  // namespace

SampleBatch sample_gaussian_ensemble(const EnergyFrame& frame, std::size_t count, const RngSpec& rng,
                                     unsigned workers) {
  const GaussianEnsemble ensemble(frame);
  SampleBatch batch;
  batch.states = collect_states(ensemble, count, rng, workers);
  batch.rng = rng;
  batch.meta.mode = SampleMode::gaussian;
  batch.meta.normalized = false;
  batch.meta.energy = frame.energy();
  batch.meta.shift = frame.shift();
  batch.meta.proposals = count;
  return batch;
}

SampleBatch sample_sphere(std::size_t n, std::size_t count, const RngSpec& rng, unsigned workers) {
  const SphereEnsemble ensemble(n);
  SampleBatch batch;
  batch.states = collect_states(ensemble, count, rng, workers);
  batch.rng = rng;
  batch.meta.mode = SampleMode::sphere;
  batch.meta.proposals = count;
  return batch;
}

double gradient_norm(const Spectrum& spectrum, std::span<const Amplitude> state) {
  if (state.size() != spectrum.dimension()) {
    throw DomainError("state length does not match the spectrum dimension",
                      {{"length", state.size()}, {"dimension", spectrum.dimension()}});
  }
  double norm2 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  std::size_t i = 0;
  const auto levels = spectrum.levels();
  const auto deg = spectrum.degeneracies();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    double pop = 0.0;
    for (std::uint64_t r = 0; r < deg[k]; ++r, ++i) pop += std::norm(state[i]);
    norm2 += pop;
    e1 += levels[k] * pop;
    e2 += levels[k] * levels[k] * pop;
  }
  if (std::abs(norm2 - 1.0) > 1e-9) {
    throw DomainError("gradient norm needs a normalized state", {{"norm_squared", norm2}});
  }
  return 2.0 * std::sqrt(std::max(0.0, e2 - e1 * e1));
}

double default_shell_width(const Spectrum& spectrum) {
  return 0.02 * (spectrum.max() - spectrum.min()) / std::sqrt(static_cast<double>(spectrum.dimension()));
}

namespace {

struct Tilt {
  double sign = 1.0;              // +1: precision ∝ E_k + s; -1: ∝ -E_k + s
  std::optional<double> shift;    // empty for the uniform proposal
  std::vector<double> scales;     // Gamma scale per level
};

Tilt make_tilt(const Spectrum& spectrum, double energy, OracleProposal proposal) {
  Tilt tilt;
  tilt.scales.assign(spectrum.distinct(), 1.0);
  if (proposal == OracleProposal::sphere) {
    return tilt;
  }
  const double e_arith = compute_means(spectrum).e_arith;
  if (energy == e_arith) {
    return tilt;
  }
  tilt.sign = energy < e_arith ? 1.0 : -1.0;
  const Spectrum oriented = tilt.sign > 0 ? spectrum : spectrum.negated();
  const double s = harmonic_shift_solve(oriented, tilt.sign * energy);
  tilt.shift = s;
  for (std::size_t k = 0; k < spectrum.distinct(); ++k) {
    const double precision = tilt.sign * spectrum.levels()[k] + s;
    if (!(precision > 0.0)) {
      throw DomainError("tilted proposal needs the energy strictly above the minimum level");
    }
    tilt.scales[k] = 1.0 / precision;
  }
  return tilt;
}

struct ChunkResult {
  std::vector<OracleSample> accepted;
  std::uint64_t proposals = 0;
};

}  // namespace

OracleRun run_oracle(const Spectrum& spectrum, double energy, const OracleOptions& options, const RngSpec& rng) {
  if (spectrum.all_equal()) {
    throw DegenerateManifoldError("all levels equal: the tangential gradient vanishes on the whole manifold",
                                  {{"level", spectrum.min()}});
  }
  if (!(energy > spectrum.min() && energy < spectrum.max())) {
    throw DomainError("oracle sampling needs E_min < E < E_max",
                      {{"energy", energy}, {"e_min", spectrum.min()}, {"e_max", spectrum.max()}});
  }
  if (!(options.shell_width > 0.0)) {
    throw DomainError("shell width must be positive", {{"shell_width", options.shell_width}});
  }
  if (options.count == 0 || options.max_draws == 0) {
    throw DomainError("oracle needs count > 0 and max_draws > 0");
  }

  const Tilt tilt = make_tilt(spectrum, energy, options.proposal);
  const auto levels = spectrum.levels();
  const auto deg = spectrum.degeneracies();
  const std::size_t m = levels.size();
  const double n = static_cast<double>(spectrum.dimension());
  const double eta = options.shell_width;
  const double log_reference = tilt.shift ? std::log(tilt.sign * energy + *tilt.shift) : 0.0;

  auto process_chunk = [&](std::size_t chunk) {
    ChunkResult result;
    Engine engine = make_engine(rng, chunk);
    boost::random::normal_distribution<double> normal;
    std::vector<std::gamma_distribution<double>> gammas;
    gammas.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
      gammas.emplace_back(static_cast<double>(deg[k]), tilt.scales[k]);
    }
    const std::uint64_t begin = static_cast<std::uint64_t>(chunk) * kOracleChunk;
    const std::uint64_t end = std::min<std::uint64_t>(options.max_draws, begin + kOracleChunk);
    std::vector<double> pop(m);
    for (std::uint64_t draw = begin; draw < end; ++draw) {
      ++result.proposals;
      double total = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        pop[k] = gammas[k](engine);
        total += pop[k];
      }
      double e1 = 0.0;
      double e2 = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        pop[k] /= total;
        e1 += levels[k] * pop[k];
        e2 += levels[k] * levels[k] * pop[k];
      }
      if (!(std::abs(e1 - energy) < eta)) continue;

      OracleSample sample;
      sample.energy = e1;
      double log_weight = std::log(2.0 * std::sqrt(std::max(0.0, e2 - e1 * e1)));
      if (tilt.shift) {
        log_weight += n * (std::log(tilt.sign * e1 + *tilt.shift) - log_reference);
      }
      sample.weight = std::exp(log_weight);
      if (options.keep_states) {
        sample.state.amplitudes.resize(spectrum.dimension());
        std::size_t i = 0;
        for (std::size_t k = 0; k < m; ++k) {
          double block = 0.0;
          const std::size_t start = i;
          for (std::uint64_t r = 0; r < deg[k]; ++r, ++i) {
            const double re = normal(engine);
            const double im = normal(engine);
            sample.state.amplitudes[i] = {re, im};
            block += re * re + im * im;
          }
          const double scale = std::sqrt(pop[k] / block);
          for (std::size_t j = start; j < i; ++j) sample.state.amplitudes[j] *= scale;
        }
      }
      sample.populations = pop;
      result.accepted.push_back(std::move(sample));
    }
    return result;
  };

  OracleRun run;
  run.tilt_shift = tilt.shift;
  const std::size_t total_chunks = (options.max_draws + kOracleChunk - 1) / kOracleChunk;
  const std::size_t round = std::max(1u, options.workers);
  std::uint64_t accepted_in_used_chunks = 0;
  for (std::size_t first = 0; first < total_chunks && run.samples.size() < options.count; first += round) {
    const std::size_t last = std::min(total_chunks, first + round);
    std::vector<ChunkResult> results(last - first);
    parallel_chunks(first, last, options.workers,
                    [&](std::size_t chunk) { results[chunk - first] = process_chunk(chunk); });
    for (auto& r : results) {
      if (run.samples.size() >= options.count) break;
      run.proposals += r.proposals;
      accepted_in_used_chunks += r.accepted.size();
      for (auto& s : r.accepted) {
        if (run.samples.size() >= options.count) break;
        run.samples.push_back(std::move(s));
      }
    }
  }
  run.acceptance_rate =
      run.proposals > 0 ? static_cast<double>(accepted_in_used_chunks) / static_cast<double>(run.proposals) : 0.0;
  run.complete = run.samples.size() >= options.count;
  if (!run.complete) {
    run.warning = "low acceptance: " + std::to_string(run.samples.size()) + " of " +
                  std::to_string(options.count) + " samples accepted within " +
                  std::to_string(options.max_draws) + " draws (rate " + std::to_string(run.acceptance_rate) + ")";
  }
  return run;
}

SampleBatch oracle_manifold_sample(const Spectrum& spectrum, double energy, double shell_width, std::size_t count,
                                   std::size_t max_draws, const RngSpec& rng, OracleProposal proposal,
                                   unsigned workers) {
  OracleOptions options;
  options.shell_width = shell_width;
  options.count = count;
  options.max_draws = max_draws;
  options.proposal = proposal;
  options.keep_states = true;
  options.workers = workers;
  OracleRun run = run_oracle(spectrum, energy, options, rng);

  SampleBatch batch;
  batch.rng = rng;
  batch.weights.emplace();
  batch.states.reserve(run.samples.size());
  batch.weights->reserve(run.samples.size());
  for (auto& s : run.samples) {
    batch.states.push_back(std::move(s.state));
    batch.weights->push_back(s.weight);
  }
  batch.meta.mode = SampleMode::oracle;
  batch.meta.energy = energy;
  batch.meta.shift = run.tilt_shift;
  batch.meta.shell_width = shell_width;
  batch.meta.acceptance_rate = run.acceptance_rate;
  batch.meta.proposals = run.proposals;
  batch.meta.complete = run.complete;
  batch.meta.warning = run.warning;
  return batch;
}

}  // namespace mee
