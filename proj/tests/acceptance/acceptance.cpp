// Acceptance suite: one [PASS]/[FAIL] line per criterion. Exits nonzero if
// any criterion fails. Tolerances are fixed here, next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mee/bounds.hpp"
#include "mee/canonical.hpp"
#include "mee/cli.hpp"
#include "mee/error.hpp"
#include "mee/experiments.hpp"
#include "mee/sampler.hpp"
#include "mee/spectrum.hpp"
#include "oracles.hpp"

using namespace mee;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] AC%d %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

constexpr double kSqrt7 = 2.6457513110645906;

Outcome example1_constants() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_c = 1.0;
  double worst_a = 0.0;
  for (std::uint64_t copies : {2731ULL, 5000ULL, 33334ULL, 333334ULL, 3333334ULL}) {
    const auto k = constants_for(Spectrum::uniform({1, 2, 3}, copies), 1.5, 2.0);
    ok = ok && k.frame.shift() > -0.5 && k.frame.shift() < 0.0 && k.c >= 3.0 / 64.0 && k.a > 0.0 && k.a < 30830.0;
    worst_c = std::min(worst_c, k.c);
    worst_a = std::max(worst_a, k.a);
  }
  const double secs = seconds_since(start);
  return {ok && secs < 1.0, fmt("min c = %.10f (>= 3/64), max a = %.3f (< 30830), %.3fs", worst_c, worst_a, secs)};
}

Outcome example2_canonical() {
  const auto start = std::chrono::steady_clock::now();
  const BipartiteSpectrum bs({1, 2, 3}, {0.0});
  const std::vector<double> expected{(5 + kSqrt7) / 12, 2 * (4 - kSqrt7) / 12, (-1 + kSqrt7) / 12};
  const auto lim = rho_c_limit(bs, 1.5);
  double limit_err = 0.0;
  for (std::size_t i = 0; i < 3; ++i) limit_err = std::max(limit_err, std::abs(lim.diagonal()[i] - expected[i]));
  bool ok = limit_err <= 1e-12 && lim.is_diagonal();

  const double target = (-4 + kSqrt7) / 3;
  double worst_ratio = 0.0;
  for (double n : {829.0, 2048.0, 8193.0, 1e5}) {
    const auto rho = rho_c_bipartite(bs, 1.5, 2.0, n);
    const double d = hs_distance(rho, DensityMatrix::from_diagonal(expected));
    worst_ratio = std::max(worst_ratio, d / (4 / std::sqrt(n)));
    const double s = concentration_shift_solve(bs.combined(), 1.5, 2.0, 1e-12, n).shift();
    ok = ok && d <= 4 / std::sqrt(n) && s < target && s > target - 4 * (35 + 16 * kSqrt7) / (63 * std::sqrt(n));
  }
  const double secs = seconds_since(start);
  return {ok && secs < 1.0,
          fmt("limit error %.2e (<= 1e-12), worst ||rho_n - rho||/(4/sqrt n) = %.3f, shift bracket held, %.3fs",
              limit_err, worst_ratio, secs)};
}

Outcome shift_solver() {
  const Spectrum two({1, 3});
  const double s15 = harmonic_shift_solve(two, 1.5);
  const double s18 = harmonic_shift_solve(two, 1.8);
  bool ok = std::abs(s15) <= 1e-10 && std::abs(s18 - 3.0) <= 1e-10;

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(2, 12);
  std::uniform_int_distribution<int> deg(1, 50);
  double worst_residual = 0.0;
  double worst_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int m = count(rng);
    oracle::Levels l;
    std::vector<double> levels;
    std::vector<std::uint64_t> degs;
    for (int j = 0; j < m; ++j) {
      levels.push_back(-5.0 + 10.0 * u(rng));
      degs.push_back(static_cast<std::uint64_t>(deg(rng)));
      l.e.push_back(levels.back());
      l.d.push_back(static_cast<double>(degs.back()));
    }
    const Spectrum s(levels, degs);
    const Means mm = compute_means(s);
    const double e = mm.e_min + (0.02 + 0.96 * u(rng)) * (mm.e_arith - mm.e_min);
    const double x = harmonic_shift_solve(s, e);
    const double eh = 1.0 / inverse_moments(s, x).first;
    worst_residual = std::max(worst_residual, std::abs(eh - (e + x)) / (e + x));
    const double ref = oracle::shift_by_bisection(l, e);
    worst_gap = std::max(worst_gap, std::abs(x - ref) / std::max(1.0, std::abs(e + x)));
  }
  ok = ok && worst_residual <= 1e-12 && worst_gap <= 1e-9;
  return {ok, fmt("s(1.5) = %.2e, s(1.8) - 3 = %.2e, worst relative residual %.2e (<= 1e-12), worst gap to "
                  "bisection %.2e",
                  s15, s18 - 3.0, worst_residual, worst_gap)};
}

Outcome gaussian_moments() {
  const auto start = std::chrono::steady_clock::now();
  // 4096 is not divisible by 3; the closest uniform-ish split
  const Spectrum s({1, 2, 3}, {1366, 1365, 1365});
  const auto frame = harmonic_frame(s, 1.5);
  const auto report = run_moment_experiment(frame, 100000, {20240, 4});
  const double secs = seconds_since(start);
  std::string detail;
  for (const auto& q : report.quantities) {
    detail += fmt("%s %.6g vs %.6g; ", q.name.c_str(), q.measured, q.reference.value_or(NAN));
  }
  detail += fmt("%.1fs (< 30s)", secs);
  return {report.passed() && secs < 30.0, detail};
}

Outcome oracle_vs_gaussian() {
  const Spectrum s({1, 2, 3});
  const double eta = default_shell_width(s);
  auto oracle_means = [&](double width, std::uint64_t stream) {
    OracleOptions o;
    o.shell_width = width;
    o.count = 10000;
    o.max_draws = 100'000'000;
    o.keep_states = false;
    const auto run = run_oracle(s, 1.5, o, {5150, stream});
    if (!run.complete) throw InfeasibleError("oracle did not reach 10^4 acceptances");
    std::vector<double> w;
    for (const auto& x : run.samples) w.push_back(x.weight);
    std::vector<MeanEstimate> out;
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<double> v;
      for (const auto& x : run.samples) v.push_back(x.populations[k]);
      out.push_back(batch_mean(v, w));
    }
    return out;
  };
  const auto wide = oracle_means(eta, 0);
  const auto narrow = oracle_means(eta / 2, 1);

  const auto batch = sample_gaussian_ensemble(harmonic_frame(s, 1.5), 10000, {5150, 2});
  bool ok = true;
  double worst = 0.0;
  double worst_halving = 0.0;
  std::string detail;
  const auto exact = oracle::three_level_hausdorff_populations();
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> v;
    for (const auto& st : batch.states) v.push_back(std::norm(st.amplitudes[k]));
    const auto g = batch_mean(v);
    const double z = std::abs(wide[k].mean - g.mean) / std::hypot(wide[k].std_error, g.std_error);
    const double h = std::abs(wide[k].mean - narrow[k].mean) / std::hypot(wide[k].std_error, narrow[k].std_error);
    worst = std::max(worst, z);
    worst_halving = std::max(worst_halving, h);
    ok = ok && z <= 5.0 && h <= 5.0;
    detail += fmt("k=%zu oracle %.5f gaussian %.5f exact %.5f; ", k + 1, wide[k].mean, g.mean, exact[k]);
  }
  detail += fmt("worst z %.2f, eta-halving z %.2f (both <= 5)", worst, worst_halving);
  return {ok, detail};
}

Outcome typical_reduced_state() {
  const BipartiteSpectrum bs({1, 2, 3}, std::vector<double>(2048, 0.0));
  const auto report = run_reduced_dm_experiment(bs, 1.5, 2.0, 10000, {777, 0});
  const double n = 3.0 * 2048;
  const double scale = 3 * std::sqrt(8.0) * 59 / std::pow(n, 0.25);
  const auto* q = report.find("mean_hs_deviation");
  if (!q) return {false, "mean_hs_deviation missing"};
  const auto* lim = report.find("limit_hs_deviation");
  return {q->measured < scale, fmt("mean ||psi^A - rho_c|| = %.5f < %.4f; ||rho_c^(n) - rho_c|| = %.5f", q->measured,
                                   scale, lim ? lim->measured : NAN)};
}

Outcome qubit_tails() {
  struct Case {
    double e1, e2, e;
    std::size_t b;
  };
  double worst = 0.0;
  bool dominated = true;
  for (const auto& c : {Case{1, 0, 0.25, 10}, Case{1, 0, 0.25, 100}, Case{3, 1, 1.6, 50}}) {
    const double rz = 1.0 - 2.0 * (c.e - c.e2) / (c.e1 - c.e2);
    for (double eps = 0.0; eps <= 1.0 + 1e-12; eps += 0.025) {
      const double exact = qubit_exact_tail(c.e1, c.e2, c.e, c.b, eps);
      worst = std::max(worst, std::abs(exact - oracle::qubit_tail_quadrature(rz, c.b, eps)));
      dominated = dominated && exact <= qubit_exponential_bound(c.e1, c.e2, c.e, c.b, eps) * (1 + 1e-14);
    }
  }
  return {worst <= 1e-6 && dominated,
          fmt("worst |closed form - quadrature| = %.2e (<= 1e-6), exponential bound dominates: %s", worst,
              dominated ? "yes" : "no")};
}

Outcome determinant_maximizer() {
  std::mt19937_64 rng(8080);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 3 + trial % 3;
    std::vector<double> levels;
    for (std::size_t i = 0; i < dim; ++i) levels.push_back(-1.0 + 5.0 * u(rng));
    const double lo = *std::min_element(levels.begin(), levels.end());
    const double hi = *std::max_element(levels.begin(), levels.end());
    const double e = lo + (0.05 + 0.9 * u(rng)) * (hi - lo);
    const auto got = detmax_state(levels, e).diagonal();
    const auto want = oracle::logdet_maximizer(levels, e);
    for (std::size_t i = 0; i < dim; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  double qubit_gap = 0.0;
  for (double e : {0.05, 0.25, 0.45}) {
    const auto d = detmax_state(std::vector<double>{1, 0}, e).diagonal();
    const auto q = qubit_canonical(1, 0, e).diagonal();
    qubit_gap = std::max({qubit_gap, std::abs(d[0] - q[0]), std::abs(d[1] - q[1])});
  }
  // "exactly" is read as agreement to the solver tolerance
  return {worst <= 1e-6 && qubit_gap <= 1e-12,
          fmt("worst entry gap to Newton oracle %.2e (<= 1e-6), qubit gap %.2e (<= 1e-12)", worst, qubit_gap)};
}

Outcome spin_probe() {
  SpinProbeOptions o;
  o.count = 10000;
  const auto r = spin_concentration_probe({10, 0.3, 0.4}, o, {1010, 0});
  const auto* l = r.find("L");
  const auto* count = r.find("low_level_count");
  const auto* c = r.find("c");
  if (!l || !count || !c) return {false, "missing quantities"};
  const bool ok = l->pass.value_or(false) && count->measured == 176 && count->pass.value_or(false) &&
                  c->pass.value_or(false);
  return {ok, fmt("L = %.4f (SE %.1e) >= 0.25 - 5 SE; count %.0f <= %.2f; c = %.3e vs %.3e (factor 2)", l->measured,
                  l->std_error.value_or(NAN), count->measured, count->reference.value_or(NAN), c->measured,
                  c->reference.value_or(NAN))};
}

Outcome determinism() {
  const std::string dir = std::filesystem::temp_directory_path() / "mee_acceptance";
  std::filesystem::create_directories(dir);
  const std::string spec = dir + "/spectrum.json";
  {
    std::ofstream(spec) << R"({"levels": [1, 2, 3], "degeneracies": [100, 100, 100]})";
  }
  std::vector<std::vector<std::string>> runs{
      {"verify", "--experiment", "moments", "--spectrum", spec, "--energy", "1.5", "--count", "20000"},
      {"verify", "--experiment", "spins", "--count", "1000", "--m", "8"},
  };
  bool ok = true;
  std::string detail;
  for (auto args : runs) {
    args.insert(args.end(), {"--seed", "31"});
    std::string first;
    for (const char* w : {"1", "3", "8"}) {
      auto a = args;
      a.insert(a.end(), {"--workers", w});
      std::ostringstream out, err;
      const int code = cli::run(a, out, err);
      ok = ok && code == 0;
      if (first.empty()) {
        first = out.str();
      } else {
        ok = ok && out.str() == first;
      }
    }
    detail += args[2] + fmt(" %zu bytes identical across workers 1/3/8; ", first.size());
  }
  std::filesystem::remove_all(dir);
  return {ok, detail};
}

}  // namespace

int main() {
  criterion(1, "three-level constants", example1_constants);
  criterion(2, "canonical matrix of the three-level example", example2_canonical);
  criterion(3, "shift solver", shift_solver);
  criterion(4, "Gaussian ensemble moments", gaussian_moments);
  criterion(5, "oracle vs Gaussian estimates", oracle_vs_gaussian);
  criterion(6, "typical reduced state", typical_reduced_state);
  criterion(7, "qubit exact tail", qubit_tails);
  criterion(8, "determinant maximizer", determinant_maximizer);
  criterion(9, "spin probe", spin_probe);
  criterion(10, "determinism across workers", determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
