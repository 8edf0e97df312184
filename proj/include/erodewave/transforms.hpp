#pragma once

#include <vector>

namespace erodewave {

/// Inverse slope z(u) as a piecewise-linear function of height u; z = 1 outside the window.
struct ZProfile {
  std::vector<double> u;
  std::vector<double> z;

  double eval(double at) const;
  bool empty() const { return u.empty(); }
};

/// zeta(q) on [-D, 0] as a piecewise-linear interpolant through ascending nodes.
/// A repeated q marks a jump; eval returns the left limit there. zeta = 1 left of -D.
struct QProfile {
  double total_drop = 0.0;
  std::vector<double> q;
  std::vector<double> zeta;

  double eval(double at) const;
  /// Right limit at `at`; differs from eval only at jumps.
  double eval_right(double at) const;
  /// Abscissae where the profile jumps.
  std::vector<double> jumps() const;
};

struct HeightVertex {
  double x = 0.0;
  double u = 0.0;
  double w = 1.0;     // slope u_x; +inf inside a vertical jump
  bool jump = false;  // a vertical segment starts here
};

struct HeightCurve {
  std::vector<HeightVertex> vertices;
  double total_drop = 0.0;
  double right_offset = 0.0;  // u - x on the right asymptote
  double left_offset = 0.0;   // u - x on the left asymptote
};

/// Drop area of (1 - z) under the piecewise-linear profile.
double total_drop(const ZProfile& zp);

/// Drop function q(u) = -integral_u^inf (1 - z) dv, tabulated at the profile nodes.
/// Zero-valued stretches in u become shock intervals of equal length in q.
QProfile u_to_q(const ZProfile& zp);

/// Inverse of u_to_q with u(0) = u_anchor. Each segment is mapped with the
/// exact inverse of the trapezoidal drop rule; zeta is capped at 1 - cap_eps.
ZProfile q_to_u(const QProfile& qp, double u_anchor, double cap_eps = 1e-6);

/// Physical curve x(u) = u - q(u) + x_shift, so u = x on the right and u = x - D on the left
/// when x_shift = 0. Stretches with z = 0 become vertical jumps.
HeightCurve reconstruct_height(const ZProfile& zp, double x_shift = 0.0);

/// Drop-weighted mean of x = u - q over the profile's drop.
double mean_x(const QProfile& qp, const ZProfile& zp);

/// Smallest u at which z reaches `level` (linear interpolation), or NaN if never reached.
double level_crossing(const ZProfile& zp, double level);

}  // namespace erodewave
