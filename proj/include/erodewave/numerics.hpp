#pragma once

#include <algorithm>
#include <array>
#include <initializer_list>
#include <utility>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include "erodewave/error.hpp"

namespace erodewave::numerics {

using ScalarFn = std::function<double(double)>;

struct RootOptions {
  double residual_tol = 1e-12;
  double x_tol = 1e-15;
  int max_iter = 200;
};

/**
 * Solve f(x) = target for a non-decreasing f on [lo, hi].
 *
 * Bracketed bisection until |f(x) - target| <= residual_tol or the bracket
 * collapses, followed by one Newton polish when a derivative is supplied and
 * the polished point stays inside the bracket and improves the residual.
 * Throws NumericalError if target is not bracketed.
 */
double solve_increasing(const ScalarFn& f, double target, double lo, double hi,
                        const ScalarFn& df = {}, RootOptions opts = {});

/// Root of a sign-changing f on [lo, hi] (either orientation).
double bisect_root(const ScalarFn& f, double lo, double hi, RootOptions opts = {});

struct Extremum {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal f on [a, b].
Extremum golden_max(const ScalarFn& f, double a, double b, double rel_tol = 1e-10);

/// Grid scan with n points followed by golden-section refinement around the best point.
Extremum grid_max(const ScalarFn& f, double a, double b, std::size_t n, double rel_tol = 1e-10);
Extremum grid_min(const ScalarFn& f, double a, double b, std::size_t n, double rel_tol = 1e-10);

/// Explicit Dormand-Prince 5(4) pair with standard step-size control.
template <std::size_t N>
class DormandPrince {
 public:
  using State = std::array<double, N>;
  using Rhs = std::function<State(double, const State&)>;

  struct Step {
    State y;
    State err;
  };

  explicit DormandPrince(Rhs rhs) : rhs_(std::move(rhs)) {}

  /// One trial step of size h from (t, y); returns the 5th-order solution and error estimate.
  Step trial(double t, const State& y, double h) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State out = y;
      for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
      return out;
    };
    const State k1 = rhs_(t, y);
    const State k2 = rhs_(t + c2 * h, comb({{a21, &k1}}));
    const State k3 = rhs_(t + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
    const State k4 = rhs_(t + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = rhs_(t + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 =
        rhs_(t + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    Step s;
    s.y = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = rhs_(t + h, s.y);
    for (std::size_t i = 0; i < N; ++i)
      s.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    return s;
  }

  /// Scaled RMS error norm for a trial step.
  static double error_norm(const State& y0, const Step& s, double atol, double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(s.y[i]));
      acc += (s.err[i] / sc) * (s.err[i] / sc);
    }
    return std::sqrt(acc / N);
  }

  /// Next step size from an error norm (safety 0.9, growth clamped to [0.2, 5]).
  static double next_h(double h, double err) {
    if (err == 0.0) return 5.0 * h;
    const double fac = 0.9 * std::pow(err, -0.2);
    return h * std::clamp(fac, 0.2, 5.0);
  }

 private:
  Rhs rhs_;
};

}  // namespace erodewave::numerics
