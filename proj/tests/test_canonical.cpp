#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mee/canonical.hpp"
#include "mee/error.hpp"
#include "oracles.hpp"

using namespace mee;
using Catch::Approx;

namespace {

const double kSqrt7 = std::sqrt(7.0);

std::vector<double> example2_limit() {
  return {(5.0 + kSqrt7) / 12.0, 2.0 * (4.0 - kSqrt7) / 12.0, (-1.0 + kSqrt7) / 12.0};
}

BipartiteSpectrum example2(std::size_t dim_b = 1) { return BipartiteSpectrum({1, 2, 3}, std::vector<double>(dim_b, 0.0)); }

}  // namespace

TEST_CASE("density matrix basics") {
  CHECK_THROWS_AS(DensityMatrix(Eigen::MatrixXcd(2, 3)), DomainError);
  Eigen::MatrixXcd m(2, 2);
  m << 0.5, std::complex<double>(0, 0.1), std::complex<double>(0, -0.1), 0.5;
  DensityMatrix d(m);
  CHECK(d.is_hermitian());
  CHECK_FALSE(d.is_diagonal());
  CHECK(d.trace() == Approx(1.0));
  CHECK(d.eigenvalues()(0) == Approx(0.4));
  CHECK(hs_distance(d, DensityMatrix::from_diagonal(std::vector<double>{0.5, 0.5})) ==
        Approx(std::sqrt(0.02)).epsilon(1e-14));
}

TEST_CASE("partial trace of product and entangled states") {
  // |0>|φ> with φ = (1, i)/√2
  std::vector<std::complex<double>> psi(4, 0.0);
  psi[0] = 1.0 / std::sqrt(2.0);
  psi[1] = std::complex<double>(0, 1.0 / std::sqrt(2.0));
  const Eigen::MatrixXcd r = partial_trace_b(psi, 2, 2);
  CHECK(std::abs(r(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(r(1, 1)) < 1e-15);

  // Bell state, unnormalized input
  std::vector<std::complex<double>> bell{3.0, 0.0, 0.0, 3.0};
  const Eigen::MatrixXcd b = partial_trace_b(bell, 2, 2);
  CHECK(std::abs(b(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(b(0, 1)) < 1e-15);
  CHECK_THROWS_AS(partial_trace_b(bell, 3, 2), DomainError);
}

TEST_CASE("bipartite combined spectrum") {
  BipartiteSpectrum bs({0, 1}, {0, 0, 2});
  const Spectrum s = bs.combined();
  CHECK(s.dimension() == 6);
  CHECK(s.expanded() == std::vector<double>{0, 0, 2, 1, 1, 3});
}

TEST_CASE("canonical matrix limit for example 2") {
  const auto expected = example2_limit();
  for (std::size_t dim_b : {1u, 7u, 64u}) {
    const auto rho = rho_c_limit(example2(dim_b), 1.5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(rho.diagonal()[i] - expected[i]) <= 1e-12);
    CHECK(rho.is_diagonal());
  }
}

TEST_CASE("finite-n canonical matrix approaches the limit") {
  const auto lim = DensityMatrix::from_diagonal(example2_limit());
  const double target = (-4.0 + kSqrt7) / 3.0;
  for (double n : {829.0, 2048.0, 8193.0, 1e5}) {
    INFO("n = " << n);
    const auto rho = rho_c_bipartite(example2(), 1.5, 2.0, n);
    CHECK(hs_distance(rho, lim) <= 4.0 / std::sqrt(n));
    const auto frame = concentration_shift_solve(example2().combined(), 1.5, 2.0, 1e-12, n);
    CHECK(frame.shift() < target);
    CHECK(frame.shift() > target - 4.0 * (35.0 + 16.0 * kSqrt7) / (63.0 * std::sqrt(n)));
    CHECK(rho.trace() - 1.0 == Approx(rho_c_trace_deviation(frame)).margin(1e-12));
  }
}

TEST_CASE("canonical matrix with real B levels") {
  // Entry-by-entry evaluation of the defining sum.
  BipartiteSpectrum bs({0.0, 1.0}, {0.0, 0.5, 2.0});
  const Spectrum combined = bs.combined();
  const auto frame = concentration_shift_solve(combined, 0.9, 1.5);
  const auto rho = rho_c_from_frame(bs, frame);
  const double n = 6.0;
  for (std::size_t p = 0; p < 2; ++p) {
    double sum = 0.0;
    for (double eb : bs.levels_b()) sum += frame.shifted_energy() / (bs.levels_a()[p] + eb + frame.shift());
    CHECK(rho.diagonal()[p] == Approx((1 + 1 / (2 * n)) / (n + 1) * sum).epsilon(1e-14));
  }
  CHECK(rho.trace() - 1.0 == Approx(rho_c_trace_deviation(frame)).margin(1e-12));

  const auto single = rho_c_bipartite(BipartiteSpectrum({2.0}, {0.0, 1.0, 3.0}), 2.5, 1.0, 1e6);
  CHECK(single.dim() == 1);
  CHECK(single.trace() == Approx(1.0).margin(1e-2));
}

TEST_CASE("equal B levels give diagonal proportional to inverse shifted A levels") {
  const auto rho = rho_c_bipartite(example2(5), 1.5, 2.0, 5000.0);
  const auto det = detmax_state(std::vector<double>{1, 2, 3}, 1.5);
  const auto d = rho.diagonal();
  const auto l = det.diagonal();
  CHECK(d[0] / d[2] > 1.0);
  CHECK(l[0] / l[2] == Approx(rho_c_limit(example2(), 1.5).diagonal()[0] / rho_c_limit(example2(), 1.5).diagonal()[2])
                           .epsilon(1e-12));
}

TEST_CASE("delta and reduced-state tail for example 2") {
  for (double n : {550.0, 829.0, 2048.0, 8193.0, 1e5, 1e7}) {
    INFO("n = " << n);
    const auto k = constants_for(example2().combined(), 1.5, 2.0, n);
    CHECK(delta_deviation(k) < 58.0 / std::pow(n, 0.25));
  }
  const auto k = constants_for(example2().combined(), 1.5, 2.0, 8193.0);
  const auto tail = reduced_dm_tail(k, 3, 0.5, delta_deviation(k));
  CHECK(tail.threshold == Approx(std::sqrt(8.0) * 3.0 * (0.5 + delta_deviation(k))));
  CHECK(std::exp(tail.log_bound - log_tail_bound(k, 0.5)) == Approx(12.0).epsilon(1e-12));
  CHECK(12.0 * k.a < 369960.0);
  const auto single = reduced_dm_tail(k, 1, 0.5, 0.0);
  CHECK(std::exp(single.log_bound - log_tail_bound(k, 0.5)) == Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(reduced_dm_tail(k, 3, 0.0, 0.1), DomainError);

  const auto ex1 = constants_for(Spectrum::uniform({1, 2, 3}, 2731), 1.5, 2.0);
  CHECK(delta_deviation(ex1) == Approx(4.6084045182310680).epsilon(1e-12));

  double previous = 1e9;
  for (double n : {1e4, 1e6, 1e8, 1e10}) {
    const double d = delta_deviation(constants_for(example2().combined(), 1.5, 2.0, n));
    CHECK(d < previous);
    previous = d;
  }
  CHECK(previous < 0.2);
}

TEST_CASE("determinant maximizer") {
  const auto two = detmax_state(std::vector<double>{1, 0}, 0.25);
  CHECK(two.diagonal()[0] == Approx(0.25).epsilon(1e-12));
  CHECK(two.diagonal()[1] == Approx(0.75).epsilon(1e-12));

  const auto three = detmax_state(std::vector<double>{1, 2, 3}, 1.5);
  const auto expected = example2_limit();
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(three.diagonal()[i] - expected[i]) <= 1e-12);

  const auto mean = detmax_state(std::vector<double>{1, 2, 4}, 7.0 / 3.0);
  for (double v : mean.diagonal()) CHECK(v == Approx(1.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(detmax_state(std::vector<double>{1, 2}, 2.0), DomainError);
  CHECK_THROWS_AS(detmax_state(std::vector<double>{2, 2}, 2.0), DomainError);
}

TEST_CASE("determinant maximizer matches a constrained Newton oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 2 + trial % 5;
    std::vector<double> levels;
    for (std::size_t i = 0; i < dim; ++i) levels.push_back(5.0 * u(rng) - 1.0);
    const double lo = *std::min_element(levels.begin(), levels.end());
    const double hi = *std::max_element(levels.begin(), levels.end());
    const double e = lo + (0.05 + 0.9 * u(rng)) * (hi - lo);
    const auto got = detmax_state(levels, e).diagonal();
    const auto want = oracle::logdet_maximizer(levels, e);
    for (std::size_t i = 0; i < dim; ++i) CHECK(got[i] == Approx(want[i]).margin(1e-9));
  }
}

TEST_CASE("determinant maximizer beats feasible perturbations") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  const std::vector<double> levels{0.3, 1.1, 2.0, 3.7};
  const double e = 1.2;
  const auto best = detmax_state(levels, e).diagonal();
  double best_log = 0.0;
  double total = 0.0;
  double energy = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    best_log += std::log(best[i]);
    total += best[i];
    energy += best[i] * levels[i];
  }
  CHECK(total == Approx(1.0).margin(1e-10));
  CHECK(energy == Approx(e).margin(1e-10));

  Eigen::MatrixXd a(2, 4);
  a.row(0).setOnes();
  a.row(1) = Eigen::Map<const Eigen::RowVectorXd>(levels.data(), 4);
  const Eigen::MatrixXd z = Eigen::FullPivLU<Eigen::MatrixXd>(a).kernel();
  for (int i = 0; i < 1000; ++i) {
    Eigen::Vector2d c(g(rng), g(rng));
    Eigen::VectorXd step = z * c;
    step *= 1e-3 / step.norm();
    double logdet = 0.0;
    for (int k = 0; k < 4; ++k) logdet += std::log(best[static_cast<std::size_t>(k)] + step(k));
    CHECK(logdet < best_log);
  }
}

TEST_CASE("qubit canonical state and tails") {
  const auto q = qubit_canonical(1, 0, 0.25);
  CHECK(q.diagonal()[0] == 0.25);
  CHECK(q.diagonal()[1] == 0.75);
  const auto near = qubit_canonical(1, 0, 1e-12);
  CHECK(near.diagonal()[1] == Approx(1.0));
  const auto det = detmax_state(std::vector<double>{1, 0}, 0.25);
  CHECK(det.diagonal()[0] == Approx(q.diagonal()[0]).epsilon(1e-12));
  CHECK_THROWS_AS(qubit_canonical(1, 0, 0.6), DomainError);
  CHECK_THROWS_AS(qubit_canonical(0, 1, 0.25), DomainError);

  CHECK(qubit_exact_tail(1, 0, 0.25, 100, 0.0) == 1.0);
  CHECK(qubit_exact_tail(1, 0, 0.25, 100, 0.2) == Approx(std::pow(1.0 - 0.04 / 0.75, 99)).epsilon(1e-13));
  CHECK(qubit_exact_tail(1, 0, 0.25, 100, 0.2) == Approx(0.0044005954705251561).epsilon(1e-12));
  CHECK(qubit_exact_tail(1, 0, 0.25, 100, 0.9) == 0.0);
  CHECK_THROWS_AS(qubit_exact_tail(1, 0, 0.25, 1, 0.1), DomainError);
  CHECK_THROWS_AS(qubit_exact_tail(1, 0, 0.25, 10, -0.1), DomainError);

  for (std::size_t b : {2u, 5u, 10u, 100u, 1000u}) {
    double prev_exact = 2.0;
    for (double eps = 0.0; eps <= 1.0; eps += 0.05) {
      const double exact = qubit_exact_tail(3, 1, 1.6, b, eps);
      const double bound = qubit_exponential_bound(3, 1, 1.6, b, eps);
      CHECK(exact <= bound * (1 + 1e-14));
      CHECK(exact <= prev_exact);
      prev_exact = exact;
      if (b > 2) CHECK(exact <= qubit_exact_tail(3, 1, 1.6, b - 1, eps));
    }
  }
}

TEST_CASE("qubit tail agrees with disc quadrature") {
  struct Case {
    double e1, e2, e;
    std::size_t b;
  };
  for (const auto& c : {Case{1, 0, 0.25, 10}, Case{1, 0, 0.25, 100}, Case{3, 1, 1.6, 50}}) {
    const double rz = 1.0 - 2.0 * (c.e - c.e2) / (c.e1 - c.e2);
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4}) {
      CHECK(std::abs(qubit_exact_tail(c.e1, c.e2, c.e, c.b, eps) - oracle::qubit_tail_quadrature(rz, c.b, eps)) <=
            1e-6);
    }
  }
}

TEST_CASE("Hall density") {
  using boost::math::quadrature::gauss_kronrod;
  CHECK(hall_radial_density(2, 0.0) == hall_radial_density(2, 0.9));
  CHECK(hall_radial_density(2, 0.3) == Approx(3.0 / (4.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(hall_radial_density(5, 1.0) == 0.0);
  CHECK_THROWS_AS(hall_radial_density(5, 1.5), DomainError);
  CHECK_THROWS_AS(hall_radial_density(1, 0.5), DomainError);
  for (std::size_t b : {2u, 5u, 50u}) {
    auto shell = [&](double r) { return 4.0 * std::numbers::pi * r * r * hall_radial_density(b, r); };
    CHECK(gauss_kronrod<double, 61>::integrate(shell, 0.0, 1.0, 15, 1e-14) == Approx(1.0).epsilon(1e-10));
  }
}
