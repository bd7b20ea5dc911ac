#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

struct Levels {
  std::vector<double> e;
  std::vector<double> d;  // degeneracies as weights
};

inline long double weighted_total(const Levels& s) {
  long double t = 0.0L;
  for (double w : s.d) t += w;
  return t;
}

// Harmonic mean of the shifted levels minus the shifted energy.
inline long double harmonic_residual(const Levels& s, long double energy, long double x, long double mult = 1.0L) {
  long double inv = 0.0L;
  for (std::size_t k = 0; k < s.e.size(); ++k) inv += s.d[k] / (s.e[k] + x);
  const long double eh = weighted_total(s) / inv;
  return mult * eh - (energy + x);
}

// Pure bisection on an increasing function over [lo, hi].
inline long double bisect(const std::function<long double(long double)>& f, long double lo, long double hi,
                          int iterations = 400) {
  if (f(lo) > 0 || f(hi) < 0) throw std::runtime_error("no sign change");
  for (int i = 0; i < iterations; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0 ? hi : lo) = mid;
  }
  return 0.5L * (lo + hi);
}

inline long double min_level(const Levels& s) {
  long double m = s.e.front();
  for (double v : s.e) m = std::min<long double>(m, v);
  return m;
}

inline long double max_level(const Levels& s) {
  long double m = s.e.front();
  for (double v : s.e) m = std::max<long double>(m, v);
  return m;
}

// Shift x with mult·E_H({E_k+x}) = E + x, found by bisection after doubling
// the bracket.
inline double shift_by_bisection(const Levels& s, double energy, long double mult = 1.0L) {
  const long double emin = min_level(s);
  const long double span = std::max<long double>(1.0L, max_level(s) - emin);
  const long double lo = -emin + 1e-15L * span;
  long double hi = -emin + span;
  auto f = [&](long double x) { return harmonic_residual(s, energy, x, mult); };
  for (int i = 0; i < 2000 && f(hi) < 0; ++i) hi = -emin + 2.0L * (hi + emin);
  return static_cast<double>(bisect(f, lo, hi));
}

// Maximizes Σ ln λ_i subject to Σ λ_i = 1 and Σ λ_i E_i = E with a damped
// Newton iteration in the null space of the two constraints.
inline std::vector<double> logdet_maximizer(const std::vector<double>& levels, double energy) {
  const int n = static_cast<int>(levels.size());
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(levels.data(), n);
  const double emin = e.minCoeff();
  const double emax = e.maxCoeff();
  const double mean = e.mean();
  // Feasible interior start: mix the uniform point with the extreme vertex
  // on the side of E.
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  const int vertex = energy < mean ? static_cast<int>(std::min_element(levels.begin(), levels.end()) - levels.begin())
                                   : static_cast<int>(std::max_element(levels.begin(), levels.end()) - levels.begin());
  const double target_vertex = energy < mean ? emin : emax;
  if (energy != mean) {
    const double t = (energy - mean) / (target_vertex - mean);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(vertex) = 1.0;
    x = (1.0 - t) * x + t * v;
  }
  Eigen::MatrixXd a(2, n);
  a.row(0).setOnes();
  a.row(1) = e.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::MatrixXd z = lu.kernel();

  auto objective = [](const Eigen::VectorXd& v) { return v.array().log().sum(); };
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd g = x.cwiseInverse();
    const Eigen::VectorXd hd = -x.array().square().inverse().matrix();
    const Eigen::MatrixXd h = hd.asDiagonal();
    const Eigen::VectorXd gz = z.transpose() * g;
    const Eigen::MatrixXd hz = z.transpose() * h * z;
    const Eigen::VectorXd step = z * hz.ldlt().solve(-gz);
    if (step.norm() < 1e-15) break;
    double alpha = 1.0;
    while ((x + alpha * step).minCoeff() <= 0.0 || objective(x + alpha * step) < objective(x)) {
      alpha *= 0.5;
      if (alpha < 1e-20) break;
    }
    x += alpha * step;
  }
  return {x.data(), x.data() + n};
}

// Probability mass of the annulus ρ >= ε on the slice z = r_z of the Bloch
// ball, for the density ∝ (1 - |r|²)^{B-2}. Integrates over ρ and φ.
inline double qubit_tail_quadrature(double rz, std::size_t dim_b, double epsilon) {
  using boost::math::quadrature::gauss_kronrod;
  const double radius = std::sqrt(std::max(0.0, 1.0 - rz * rz));
  if (epsilon >= radius) return 0.0;
  const double power = static_cast<double>(dim_b) - 2.0;
  auto density = [&](double rho) {
    const double s = 1.0 - rz * rz - rho * rho;
    return std::pow(std::max(0.0, s), power);
  };
  auto disk = [&](double from) {
    auto radial = [&](double rho) { return density(rho) * rho; };
    auto angular = [&](double) { return gauss_kronrod<double, 61>::integrate(radial, from, radius, 15, 1e-14); };
    return gauss_kronrod<double, 15>::integrate(angular, 0.0, 2.0 * M_PI, 0, 1e-14);
  };
  return disk(epsilon) / disk(0.0);
}

// Hausdorff-measure expectations of |ψ_k|² on M_E for levels {1,2,3}, one
// state each, E = 1.5. The level populations run along the segment
// p(t) = (1/2 + t, 1/2 - 2t, t), t in [0, 1/4], with weight ‖P_S∇E‖ ∝
// √(1/4 + 2t) against the uniform measure.
inline std::vector<double> three_level_hausdorff_populations() {
  using boost::math::quadrature::gauss_kronrod;
  auto w = [](double t) { return std::sqrt(0.25 + 2.0 * t); };
  const double z = gauss_kronrod<double, 61>::integrate(w, 0.0, 0.25);
  const double p1 = gauss_kronrod<double, 61>::integrate([&](double t) { return (0.5 + t) * w(t); }, 0.0, 0.25);
  const double p2 = gauss_kronrod<double, 61>::integrate([&](double t) { return (0.5 - 2 * t) * w(t); }, 0.0, 0.25);
  const double p3 = gauss_kronrod<double, 61>::integrate([&](double t) { return t * w(t); }, 0.0, 0.25);
  return {p1 / z, p2 / z, p3 / z};
}

}  // namespace oracle
