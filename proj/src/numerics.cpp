#include "erodewave/numerics.hpp"

#include <algorithm>
#include <string>

namespace erodewave::numerics {

double solve_increasing(const ScalarFn& f, double target, double lo, double hi,
                        const ScalarFn& df, RootOptions opts) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (std::abs(flo) <= opts.residual_tol) return lo;
  if (std::abs(fhi) <= opts.residual_tol) return hi;
  if (flo > 0.0 || fhi < 0.0)
    throw NumericalError("solve_increasing: target " + std::to_string(target) +
                         " not bracketed on [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
  double x = 0.5 * (lo + hi);
  double fx = f(x) - target;
  for (int it = 0; it < opts.max_iter; ++it) {
    if (std::abs(fx) <= opts.residual_tol || hi - lo <= opts.x_tol) break;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double mid = 0.5 * (lo + hi);
    if (mid == x) break;
    x = mid;
    fx = f(x) - target;
  }
  if (df) {
    const double d = df(x);
    if (d > 0.0 && std::isfinite(d)) {
      const double xn = x - fx / d;
      if (xn >= lo && xn <= hi) {
        const double fn = f(xn) - target;
        if (std::abs(fn) < std::abs(fx)) return xn;
      }
    }
  }
  return x;
}

double bisect_root(const ScalarFn& f, double lo, double hi, RootOptions opts) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw NumericalError("bisect_root: no sign change on [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
  const bool rising = flo < 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi || hi - lo <= opts.x_tol) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Extremum golden_max(const ScalarFn& f, double a, double b, double rel_tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(b - a) <= rel_tol * (std::abs(a) + std::abs(b)) + 1e-300) break;
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

Extremum grid_max(const ScalarFn& f, double a, double b, std::size_t n, double rel_tol) {
  if (n < 2) n = 2;
  const double dx = (b - a) / static_cast<double>(n - 1);
  std::size_t best = 0;
  double best_val = f(a);
  for (std::size_t i = 1; i < n; ++i) {
    const double v = f(a + dx * static_cast<double>(i));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = a + dx * static_cast<double>(best == 0 ? 0 : best - 1);
  const double hi = a + dx * static_cast<double>(std::min(best + 1, n - 1));
  Extremum refined = golden_max(f, lo, hi, rel_tol);
  if (refined.value >= best_val) return refined;
  return {a + dx * static_cast<double>(best), best_val};
}

Extremum grid_min(const ScalarFn& f, double a, double b, std::size_t n, double rel_tol) {
  Extremum e = grid_max([&](double x) { return -f(x); }, a, b, n, rel_tol);
  return {e.x, -e.value};
}

}  // namespace erodewave::numerics
