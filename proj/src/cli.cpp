#include "mee/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mee/bounds.hpp"
#include "mee/canonical.hpp"
#include "mee/error.hpp"
#include "mee/experiments.hpp"
#include "mee/io.hpp"
#include "mee/report.hpp"
#include "mee/sampler.hpp"
#include "mee/spectrum.hpp"

namespace mee::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string spectrum_path;
  std::string bipartite_path;
  std::optional<double> energy;
  std::optional<double> epsilon;
  std::vector<double> epsilon_grid;
  std::vector<double> t_values;
  std::optional<double> dimension;
  std::size_t count = 100000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::optional<double> eta;
  std::size_t max_draws = 100000000;
  double sigmas = 5.0;
  std::string mode = "gaussian";
  std::string experiment;
  std::string format = "json";
  std::string output;
  std::string out_dir;
  int m = 10;
  double alpha = 0.3;
  double gamma = 0.4;
  unsigned workers = 1;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("MEE_SEED");
  if (env == nullptr || *env == '\0') return 1;
  std::uint64_t value = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("MEE_SEED must be an unsigned integer", {{"MEE_SEED", env}});
  }
  return value;
}

double require_energy(const Options& o) {
  if (!o.energy) throw ParseError("--energy is required");
  return *o.energy;
}

Spectrum load_spectrum(const Options& o) {
  if (o.spectrum_path.empty()) throw ParseError("--spectrum is required");
  return spectrum_from_json(read_json_file(o.spectrum_path));
}

BipartiteSpectrum load_bipartite(const Options& o) {
  if (o.bipartite_path.empty()) throw ParseError("--bipartite is required");
  return bipartite_from_json(read_json_file(o.bipartite_path));
}

std::vector<double> resolved_grid(const Options& o) {
  if (o.epsilon) return {*o.epsilon};
  if (!o.epsilon_grid.empty()) return o.epsilon_grid;
  return default_epsilon_grid();
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Effective configuration with defaults resolved. The worker count is left
// out on purpose: it never changes results and would break byte equality.
json config_json(const std::string& command, const Options& o) {
  json c = {{"command", command}, {"seed", o.seed}, {"stream", o.stream}};
  if (!o.spectrum_path.empty()) c["spectrum"] = o.spectrum_path;
  if (!o.bipartite_path.empty()) c["bipartite"] = o.bipartite_path;
  if (o.energy) c["energy"] = *o.energy;
  if (o.dimension) c["dimension"] = *o.dimension;
  if (command == "bounds" || command == "verify") {
    c["epsilon_grid"] = resolved_grid(o);
  }
  if (command == "canonical" && o.epsilon) c["epsilon"] = *o.epsilon;
  if (command == "shift" && o.epsilon) c["epsilon"] = *o.epsilon;
  if (!o.t_values.empty()) c["t_values"] = o.t_values;
  if (command == "sample" || command == "verify") {
    c["count"] = o.count;
    c["eta"] = opt(o.eta);
    c["max_draws"] = o.max_draws;
  }
  if (command == "sample") c["mode"] = o.mode;
  if (command == "verify") {
    c["experiment"] = o.experiment;
    c["tolerance_sigmas"] = o.sigmas;
  }
  if (command == "spins" || (command == "verify" && o.experiment == "spins")) {
    c["m"] = o.m;
    c["alpha"] = o.alpha;
    c["gamma"] = o.gamma;
  }
  c["format"] = o.format;
  if (!o.out_dir.empty()) c["out_dir"] = o.out_dir;
  if (!o.output.empty()) c["output"] = o.output;
  return c;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << content)) throw ParseError("cannot write output file", {{"path", path.string()}});
}

void write_curves(const Options& o, const std::string& prefix, const std::map<std::string, Curve>& curves) {
  if (o.out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) throw ParseError("cannot create output directory", {{"path", o.out_dir}});
  for (const auto& [name, curve] : curves) {
    write_file(std::filesystem::path(o.out_dir) / (prefix + "_" + name + ".csv"), to_csv(curve));
  }
}

json constants_json(const ConcentrationConstants& k) {
  return {{"epsilon", k.epsilon},
          {"shift", k.frame.shift()},
          {"shifted_energy", k.frame.shifted_energy()},
          {"shifted_min", k.frame.shifted_min()},
          {"shifted_max", k.frame.shifted_max()},
          {"shifted_quadratic", k.shifted_quadratic},
          {"n", k.n},
          {"a", k.a},
          {"c", k.c},
          {"window_ok", k.window.ok},
          {"window_margin", k.window.margin}};
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

int cmd_means(const Options& o, std::ostream& out) {
  const Spectrum s = load_spectrum(o);
  const Means m = compute_means(s);
  emit(out, {{"config", config_json("means", o)},
             {"means",
              {{"e_min", m.e_min},
               {"e_max", m.e_max},
               {"e_arith", m.e_arith},
               {"e_harm", opt(m.e_harm)},
               {"e_quad", opt(m.e_quad)},
               {"n", m.n}}}});
  return kExitOk;
}

int cmd_shift(const Options& o, std::ostream& out) {
  const Spectrum s = load_spectrum(o);
  const double e = require_energy(o);
  json result;
  if (o.epsilon) {
    const EnergyFrame f = concentration_shift_solve(s, e, *o.epsilon, 1e-12, o.dimension);
    result = {{"kind", "concentration"},
              {"shift", f.shift()},
              {"shifted_energy", f.shifted_energy()},
              {"shifted_harmonic", f.shifted_harmonic()}};
  } else {
    const double d = harmonic_shift_solve(s, e);
    result = {{"kind", "harmonic"}, {"shift", d}};
  }
  emit(out, {{"config", config_json("shift", o)}, {"shift", result}});
  return kExitOk;
}

int cmd_bounds(const Options& o, std::ostream& out) {
  const Spectrum s = load_spectrum(o);
  const double e = require_energy(o);
  const auto grid = resolved_grid(o);

  std::vector<ConcentrationConstants> feasible;
  json rejected = json::array();
  for (double eps : grid) {
    try {
      feasible.push_back(constants_for(s, e, eps, o.dimension));
    } catch (const InfeasibleError& err) {
      rejected.push_back({{"epsilon", eps}, {"reason", err.details()}});
    }
  }
  if (feasible.empty()) {
    throw InfeasibleError("no feasible epsilon", {{"rejected", rejected}});
  }

  Curve curve;
  curve.columns = {"t", "bound", "log10_bound"};
  json per_t = json::array();
  for (double t : o.t_values) {
    if (!(t >= 0.0)) throw DomainError("t values must be non-negative", {{"t", t}});
    const ConcentrationConstants* best = &feasible.front();
    double best_log = log_tail_bound(*best, t);
    for (const auto& k : feasible) {
      const double lb = log_tail_bound(k, t);
      if (lb < best_log) {
        best_log = lb;
        best = &k;
      }
    }
    curve.rows.push_back({t, std::exp(best_log), best_log / std::log(10.0)});
    per_t.push_back({{"t", t}, {"epsilon", best->epsilon}, {"log10_bound", best_log / std::log(10.0)}});
  }

  json constants = json::array();
  for (const auto& k : feasible) constants.push_back(constants_json(k));
  write_curves(o, "bounds", {{"tail", curve}});
  if (o.format == "csv") {
    out << to_csv(curve);
    return kExitOk;
  }
  emit(out, {{"config", config_json("bounds", o)},
             {"constants", constants},
             {"rejected", rejected},
             {"optimal", per_t}});
  return kExitOk;
}

int cmd_canonical(const Options& o, std::ostream& out) {
  const BipartiteSpectrum bs = load_bipartite(o);
  const double e = require_energy(o);
  if (!o.epsilon) throw ParseError("--epsilon is required");
  const Spectrum combined = bs.combined();
  const EnergyFrame frame = concentration_shift_solve(combined, e, *o.epsilon, 1e-12, o.dimension);
  const DensityMatrix rho = rho_c_from_frame(bs, frame);
  const DensityMatrix limit = rho_c_limit(bs, e);

  json record = {{"rho_c", {{"diagonal", rho.diagonal()}, {"trace", rho.trace()}}},
                 {"rho_c_limit", {{"diagonal", limit.diagonal()}, {"trace", limit.trace()}}},
                 {"shift", frame.shift()},
                 {"trace_deviation", rho_c_trace_deviation(frame)},
                 {"hs_distance_to_limit", hs_distance(rho, limit)}};
  try {
    const auto k = constants_for(combined, e, *o.epsilon, o.dimension);
    const double delta = delta_deviation(k);
    record["constants"] = constants_json(k);
    record["delta"] = delta;
    const double da = static_cast<double>(bs.dim_a());
    record["tail_prefactor"] = da * (da + 1.0) * k.a * std::pow(k.n, 1.5);
    json tails = json::array();
    for (double t : o.t_values) {
      const auto tail = reduced_dm_tail(k, bs.dim_a(), t, delta);
      tails.push_back({{"t", t}, {"threshold", tail.threshold}, {"log10_bound", tail.log_bound / std::log(10.0)}});
    }
    if (!tails.empty()) record["tails"] = tails;
  } catch (const InfeasibleError& err) {
    record["delta"] = nullptr;
    record["constants"] = err.to_json();
  }
  emit(out, {{"config", config_json("canonical", o)}, {"canonical", record}});
  return kExitOk;
}

int cmd_sample(const Options& o, std::ostream& out) {
  const Spectrum s = load_spectrum(o);
  const RngSpec rng{o.seed, o.stream};
  SampleBatch batch;
  if (o.mode == "gaussian") {
    batch = sample_gaussian_ensemble(harmonic_frame(s, require_energy(o)), o.count, rng, o.workers);
  } else if (o.mode == "sphere") {
    batch = sample_sphere(s.dimension(), o.count, rng, o.workers);
  } else {
    const double e = require_energy(o);
    batch = oracle_manifold_sample(s, e, o.eta.value_or(default_shell_width(s)), o.count, o.max_draws, rng,
                                   OracleProposal::sphere, o.workers);
  }

  const bool weighted = batch.weights.has_value();
  json meta = {{"mode", to_string(batch.meta.mode)},
               {"normalized", batch.meta.normalized},
               {"count", batch.size()},
               {"dimension", s.dimension()},
               {"weights", weighted},
               {"proposals", batch.meta.proposals},
               {"complete", batch.meta.complete},
               {"acceptance_rate", opt(batch.meta.acceptance_rate)},
               {"shell_width", opt(batch.meta.shell_width)},
               {"shift", opt(batch.meta.shift)}};
  if (!batch.meta.warning.empty()) meta["warning"] = batch.meta.warning;

  if (o.format == "binary") {
    if (o.output.empty()) throw ParseError("--format binary needs --output");
    std::string bytes;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      for (const auto& a : batch.states[i].amplitudes) {
        const double re = a.real();
        const double im = a.imag();
        bytes.append(reinterpret_cast<const char*>(&re), sizeof re);
        bytes.append(reinterpret_cast<const char*>(&im), sizeof im);
      }
      if (weighted) {
        const double w = batch.weight(i);
        bytes.append(reinterpret_cast<const char*>(&w), sizeof w);
      }
    }
    write_file(o.output, bytes);
    meta["layout"] = "float64 little-endian rows: re_0, im_0, ..., re_{n-1}, im_{n-1}" +
                     std::string(weighted ? ", weight" : "");
    emit(out, {{"config", config_json("sample", o)}, {"batch", meta}});
    return kExitOk;
  }

  Curve rows;
  for (std::uint64_t k = 0; k < s.dimension(); ++k) {
    rows.columns.push_back("re_" + std::to_string(k));
    rows.columns.push_back("im_" + std::to_string(k));
  }
  if (weighted) rows.columns.push_back("weight");
  rows.rows.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::vector<double> row;
    row.reserve(rows.columns.size());
    for (const auto& a : batch.states[i].amplitudes) {
      row.push_back(a.real());
      row.push_back(a.imag());
    }
    if (weighted) row.push_back(batch.weight(i));
    rows.rows.push_back(std::move(row));
  }
  if (o.output.empty()) {
    out << to_csv(rows);
  } else {
    write_file(o.output, to_csv(rows));
    emit(out, {{"config", config_json("sample", o)}, {"batch", meta}});
  }
  return kExitOk;
}

std::vector<double> default_t_values() {
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(0.0125 * i);
  return ts;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const RngSpec rng{o.seed, o.stream};
  ExperimentReport report;
  if (o.experiment == "moments") {
    const Spectrum s = load_spectrum(o);
    report = run_moment_experiment(harmonic_frame(s, require_energy(o)), o.count, rng, o.workers, o.sigmas);
  } else if (o.experiment == "reduced-dm") {
    const BipartiteSpectrum bs = load_bipartite(o);
    report = run_reduced_dm_experiment(bs, require_energy(o), o.epsilon.value_or(2.0), o.count, rng, o.workers,
                                       o.sigmas);
  } else if (o.experiment == "tail") {
    const Spectrum s = load_spectrum(o);
    const auto grid = resolved_grid(o);
    const auto ts = o.t_values.empty() ? default_t_values() : o.t_values;
    report = run_tail_experiment(s, require_energy(o), grid, ts, o.count, rng, o.workers);
  } else {
    SpinProbeOptions p;
    p.count = o.count;
    p.max_draws = o.max_draws;
    p.shell_width = o.eta;
    p.workers = o.workers;
    p.sigmas = o.sigmas;
    report = spin_concentration_probe({o.m, o.alpha, o.gamma}, p, rng);
  }
  write_curves(o, report.name, report.curves);
  emit(out, {{"config", config_json("verify", o)}, {"passed", report.passed()}, {"report", to_json(report)}});
  return kExitOk;
}

int cmd_spins(const Options& o, std::ostream& out) {
  const Spectrum s = spin_spectrum(o.m);
  const double h = binary_entropy(o.gamma);
  double low = 0.0;
  for (std::size_t k = 0; k < s.distinct(); ++k) {
    if (s.levels()[k] < o.gamma * o.m) low += static_cast<double>(s.degeneracies()[k]);
  }
  const Means means = compute_means(s);
  emit(out, {{"config", config_json("spins", o)},
             {"spectrum", spectrum_to_json(s)},
             {"n", s.dimension()},
             {"e_arith", means.e_arith},
             {"binary_entropy", h},
             {"low_level_count", low},
             {"entropy_bound", std::exp2(o.m * h + std::log2(static_cast<double>(o.m)))}});
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  try {
    o.seed = default_seed();
  } catch (const Error& e) {
    err << e.to_json().dump() << '\n';
    return kExitInput;
  }

  CLI::App app{"Mean energy ensemble toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "RNG seed (default: $MEE_SEED or 1)");
    sub->add_option("--stream", o.stream, "RNG stream");
    sub->add_option("--workers", o.workers, "Worker threads; never changes results")->check(CLI::PositiveNumber);
    sub->add_option("--out-dir", o.out_dir, "Directory for CSV curves");
  };
  auto add_spectrum = [&](CLI::App* sub) {
    sub->add_option("--spectrum", o.spectrum_path, "Spectrum JSON {\"levels\", \"degeneracies\"}");
  };
  auto add_energy = [&](CLI::App* sub) { sub->add_option("--energy", o.energy, "Mean energy E"); };
  auto add_dimension = [&](CLI::App* sub) {
    sub->add_option("--dimension", o.dimension, "Effective dimension n for the finite-n formulas");
  };

  auto* means = app.add_subcommand("means", "Arithmetic, harmonic and quadratic means");
  add_spectrum(means);

  auto* shift = app.add_subcommand("shift", "Harmonic shift, or the concentration shift with --epsilon");
  add_spectrum(shift);
  add_energy(shift);
  shift->add_option("--epsilon", o.epsilon, "ε");
  add_dimension(shift);

  auto* bounds = app.add_subcommand("bounds", "Concentration constants and tail bounds");
  add_spectrum(bounds);
  add_energy(bounds);
  auto* eps_opt = bounds->add_option("--epsilon", o.epsilon, "Single ε");
  bounds->add_option("--epsilon-grid", o.epsilon_grid, "ε values (default 0.5, 1, ..., 8)")->excludes(eps_opt);
  bounds->add_option("--t-values", o.t_values, "t values");
  bounds->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  add_dimension(bounds);
  add_common(bounds);

  auto* canonical = app.add_subcommand("canonical", "Canonical reduced density matrix");
  canonical->add_option("--bipartite", o.bipartite_path, "Bipartite JSON {\"levels_a\", \"levels_b\"}");
  add_energy(canonical);
  canonical->add_option("--epsilon", o.epsilon, "ε");
  canonical->add_option("--t-values", o.t_values, "t values for the reduced-state tail");
  add_dimension(canonical);

  auto* sample = app.add_subcommand("sample", "Draw states");
  add_spectrum(sample);
  add_energy(sample);
  sample->add_option("--count", o.count, "Number of states");
  sample->add_option("--mode", o.mode, "gaussian, sphere or oracle")
      ->check(CLI::IsMember({"gaussian", "sphere", "oracle"}));
  sample->add_option("--eta", o.eta, "Oracle shell width");
  sample->add_option("--max-draws", o.max_draws, "Oracle proposal cap");
  sample->add_option("--format", o.format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));
  sample->add_option("--output", o.output, "Output file (CSV goes to stdout when omitted)");
  add_common(sample);

  auto* verify = app.add_subcommand("verify", "Monte Carlo checks against closed forms");
  verify->add_option("--experiment", o.experiment, "moments, reduced-dm, tail or spins")
      ->required()
      ->check(CLI::IsMember({"moments", "reduced-dm", "tail", "spins"}));
  add_spectrum(verify);
  verify->add_option("--bipartite", o.bipartite_path, "Bipartite JSON for reduced-dm");
  add_energy(verify);
  auto* veps = verify->add_option("--epsilon", o.epsilon, "ε");
  verify->add_option("--epsilon-grid", o.epsilon_grid, "ε grid for the tail bound")->excludes(veps);
  verify->add_option("--t-values", o.t_values, "t values for the tail experiment");
  verify->add_option("--count", o.count, "Samples (accepted samples for spins)");
  verify->add_option("--tolerance-sigmas", o.sigmas, "Pass threshold in standard errors");
  verify->add_option("--eta", o.eta, "Oracle shell width");
  verify->add_option("--max-draws", o.max_draws, "Oracle proposal cap");
  verify->add_option("--m", o.m, "Spins");
  verify->add_option("--alpha", o.alpha, "E = α m");
  verify->add_option("--gamma", o.gamma, "Low-energy cut γ m");
  add_common(verify);

  auto* spins = app.add_subcommand("spins", "Spin spectrum and low-level counting");
  spins->add_option("--m", o.m, "Spins");
  spins->add_option("--gamma", o.gamma, "Low-energy cut γ m");


  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << json{{"error", "parse"}, {"message", e.what()}, {"details", json::object()}}.dump() << '\n';
    return kExitInput;
  }

  if (*sample && o.format == "json") o.format = "csv";

  try {
    if (*means) return cmd_means(o, out);
    if (*shift) return cmd_shift(o, out);
    if (*bounds) return cmd_bounds(o, out);
    if (*canonical) return cmd_canonical(o, out);
    if (*sample) return cmd_sample(o, out);
    if (*verify) return cmd_verify(o, out);
    return cmd_spins(o, out);
  } catch (const ParseError& e) {
    err << e.to_json().dump() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    err << e.to_json().dump() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << json{{"error", "internal"}, {"message", e.what()}, {"details", json::object()}}.dump() << '\n';
    return kExitDomain;
  }
}

}  // namespace mee::cli
