#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "mee/rng.hpp"
#include "mee/spectrum.hpp"

namespace mee {

using Amplitude = std::complex<double>;

struct StateVector {
  std::vector<Amplitude> amplitudes;

  std::size_t size() const noexcept { return amplitudes.size(); }
  double norm_squared() const;
  StateVector normalized() const;
};

enum class SampleMode { gaussian, sphere, oracle };

const char* to_string(SampleMode mode);

struct BatchMeta {
  SampleMode mode = SampleMode::sphere;
  bool normalized = true;  // false for the Gaussian ensemble
  std::optional<double> energy;
  std::optional<double> shift;
  std::optional<double> shell_width;
  std::optional<double> acceptance_rate;
  std::uint64_t proposals = 0;
  bool complete = true;
  std::string warning;
};

struct SampleBatch {
  std::vector<StateVector> states;
  std::optional<std::vector<double>> weights;
  RngSpec rng;
  BatchMeta meta;

  std::size_t size() const noexcept { return states.size(); }
  double weight(std::size_t i) const { return weights ? (*weights)[i] : 1.0; }
  /// Copy with every state scaled to unit norm.
  SampleBatch normalized() const;
};

/// Independent complex Gaussians with variance E'/(2nE'_k) per real and
/// imaginary part. The frame must sit at the pure harmonic shift
/// (E'_H = E') with all shifted levels positive. Samples are not normalized.
class GaussianEnsemble {
 public:
  explicit GaussianEnsemble(const EnergyFrame& frame);

  std::size_t dimension() const noexcept { return dimension_; }
  void draw(Engine& engine, std::span<Amplitude> out) const;

 private:
  std::vector<double> sigma_;
  std::vector<std::uint64_t> runs_;
  std::size_t dimension_ = 0;
};

/// Uniform points on the unit sphere of C^n (2n normalized standard normals).
class SphereEnsemble {
 public:
  explicit SphereEnsemble(std::size_t n);

  std::size_t dimension() const noexcept { return dimension_; }
  void draw(Engine& engine, std::span<Amplitude> out) const;

 private:
  std::size_t dimension_;
};

inline constexpr std::size_t kSampleChunk = 256;

/// Draws `count` samples and maps each through fn(span<const Amplitude>).
/// Sample i always comes from chunk i / kSampleChunk, so the output is
/// identical for every worker count.
template <class Ensemble, class Fn>
auto map_samples(const Ensemble& ensemble, std::size_t count, const RngSpec& rng, unsigned workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::span<const Amplitude>>> {
  using Result = std::invoke_result_t<Fn&, std::span<const Amplitude>>;
  std::vector<Result> out(count);
  const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
  parallel_chunks(0, chunks, workers, [&](std::size_t chunk) {
    Engine engine = make_engine(rng, chunk);
    std::vector<Amplitude> buffer(ensemble.dimension());
    const std::size_t end = std::min(count, (chunk + 1) * kSampleChunk);
    for (std::size_t i = chunk * kSampleChunk; i < end; ++i) {
      ensemble.draw(engine, buffer);
      out[i] = fn(std::span<const Amplitude>(buffer));
    }
  });
  return out;
}

SampleBatch sample_gaussian_ensemble(const EnergyFrame& frame, std::size_t count, const RngSpec& rng,
                                     unsigned workers = 1);

SampleBatch sample_sphere(std::size_t n, std::size_t count, const RngSpec& rng, unsigned workers = 1);

/// ‖P_S ∇E(ψ)‖ = 2 √(Σ E_k²|ψ_k|² - (Σ E_k|ψ_k|²)²) for a unit state.
double gradient_norm(const Spectrum& spectrum, std::span<const Amplitude> state);

/// 0.02 (E_max - E_min) / √n
double default_shell_width(const Spectrum& spectrum);

enum class OracleProposal {
  sphere,  // uniform sphere draws
  tilted,  // angular Gaussian with precision ∝ E_k + s at the harmonic shift
};

struct OracleOptions {
  double shell_width = 0.0;
  std::size_t count = 0;
  std::size_t max_draws = 0;
  OracleProposal proposal = OracleProposal::sphere;
  bool keep_states = true;
  unsigned workers = 1;
};

struct OracleSample {
  std::vector<double> populations;  // Σ |ψ_i|² over each stored level
  double energy = 0.0;              // <ψ|H|ψ>
  double weight = 0.0;
  StateVector state;                // empty unless keep_states
};

struct OracleRun {
  std::vector<OracleSample> samples;
  std::uint64_t proposals = 0;
  double acceptance_rate = 0.0;
  bool complete = true;
  std::string warning;
  std::optional<double> tilt_shift;
};

inline constexpr std::size_t kOracleChunk = 4096;

/// Shell-rejection sampler for the Hausdorff measure on
/// M_E = {‖ψ‖ = 1, <ψ|H|ψ> = E}.
///
/// Proposals are drawn in level-population space (Gamma variates per
/// level, normalized), which has the same law as the level sums of a
/// normalized sphere or angular-Gaussian draw. States within |<H> - E| <
/// shell_width are accepted and carry the weight ‖P_S∇E‖ that converts the
/// shell measure into the Hausdorff measure; the tilted proposal adds the
/// exact density ratio (<ψ|H'|ψ>/E')^n. Within-level directions are drawn
/// uniformly only for accepted samples.
OracleRun run_oracle(const Spectrum& spectrum, double energy, const OracleOptions& options, const RngSpec& rng);

SampleBatch oracle_manifold_sample(const Spectrum& spectrum, double energy, double shell_width, std::size_t count,
                                   std::size_t max_draws, const RngSpec& rng,
                                   OracleProposal proposal = OracleProposal::sphere, unsigned workers = 1);

}  // namespace mee
