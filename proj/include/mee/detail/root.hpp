#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace mee::detail {

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Safeguarded Newton iteration for a strictly increasing function on a
// bracket [lo, hi] with f(lo) <= 0 <= f(hi). `eval(x)` returns
// {f(x), f'(x)}; `accept(x, fx)` decides convergence. Newton steps that
// leave the bracket, or that shrink it too slowly, fall back to bisection.
template <class Eval, class Accept>
RootResult increasing_root(Eval&& eval, Accept&& accept, double lo, double hi, int max_iterations) {
  RootResult best;
  double x = 0.5 * (lo + hi);
  double last_width = hi - lo;
  for (int it = 1; it <= max_iterations; ++it) {
    auto [fx, dfx] = eval(x);
    best = {x, fx, it, false};
    if (fx == 0.0 || accept(x, fx)) {
      best.converged = true;
      return best;
    }
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double width = hi - lo;
    if (width <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
      return best;
    }

    double next = x - fx / dfx;
    const bool inside = std::isfinite(next) && next > lo && next < hi;
    const bool shrinking = width < 0.5 * last_width;
    if (!inside || (!shrinking && it > 2 && std::abs(fx / dfx) > 0.25 * width)) {
      next = 0.5 * (lo + hi);
    }
    last_width = width;
    x = next;
  }
  return best;
}

}  // namespace mee::detail
