#include "erodewave/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "erodewave/error.hpp"

namespace erodewave {

namespace {

// Piecewise-linear evaluation with left-limit convention at repeated abscissae.
double interpolate_left(const std::vector<double>& xs, const std::vector<double>& ys, double at,
                        double outside_left, double outside_right) {
  if (xs.empty()) return outside_right;
  if (at < xs.front()) return outside_left;
  if (at > xs.back()) return outside_right;
  auto it = std::lower_bound(xs.begin(), xs.end(), at);
  const auto i = static_cast<std::size_t>(it - xs.begin());
  if (xs[i] == at) return ys[i];
  const double t = (at - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

}  // namespace

double ZProfile::eval(double at) const { return interpolate_left(u, z, at, 1.0, 1.0); }

double QProfile::eval(double at) const {
  if (at < -total_drop || at > 0.0) throw DomainError("QProfile::eval: q outside [-D, 0]");
  return interpolate_left(q, zeta, at, 1.0, 1.0);
}

double QProfile::eval_right(double at) const {
  if (at < -total_drop || at > 0.0) throw DomainError("QProfile::eval_right: q outside [-D, 0]");
  if (q.empty()) return 1.0;
  auto it = std::upper_bound(q.begin(), q.end(), at);
  if (it == q.begin()) return at < q.front() ? 1.0 : zeta.front();
  const auto i = static_cast<std::size_t>(it - q.begin());
  if (q[i - 1] == at) return zeta[i - 1];
  return eval(at);
}

std::vector<double> QProfile::jumps() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < q.size(); ++i)
    if (q[i] == q[i - 1] && zeta[i] != zeta[i - 1] && (out.empty() || out.back() != q[i]))
      out.push_back(q[i]);
  return out;
}

double total_drop(const ZProfile& zp) {
  double d = 0.0;
  for (std::size_t i = 1; i < zp.u.size(); ++i)
    d += 0.5 * ((1.0 - zp.z[i - 1]) + (1.0 - zp.z[i])) * (zp.u[i] - zp.u[i - 1]);
  return d;
}

QProfile u_to_q(const ZProfile& zp_in) {
  // a leading plateau at z = 1 carries no drop; the profile proper starts after it
  std::size_t start = 0;
  while (start < zp_in.u.size() && zp_in.z[start] >= 1.0) ++start;
  if (start == zp_in.u.size()) return {};
  ZProfile zp;
  zp.u.assign(zp_in.u.begin() + static_cast<std::ptrdiff_t>(start), zp_in.u.end());
  zp.z.assign(zp_in.z.begin() + static_cast<std::ptrdiff_t>(start), zp_in.z.end());
  const std::size_t n = zp.u.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (zp.z[i] < zp.z[i - 1]) throw DomainError("u_to_q: z is not non-decreasing");
    if (zp.u[i] < zp.u[i - 1]) throw DomainError("u_to_q: u nodes are not ascending");
  }
  QProfile qp;
  if (n == 0) return qp;
  std::vector<double> q(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;)
    q[i] = q[i + 1] - 0.5 * ((1.0 - zp.z[i]) + (1.0 - zp.z[i + 1])) * (zp.u[i + 1] - zp.u[i]);
  qp.total_drop = -q.front();
  for (std::size_t i = 0; i < n; ++i) {
    // flat stretches with zeta = 1 carry no drop; keep a single node for them
    if (!qp.q.empty() && q[i] == qp.q.back() && zp.z[i] == qp.zeta.back()) continue;
    qp.q.push_back(q[i]);
    qp.zeta.push_back(zp.z[i]);
  }
  if (qp.total_drop == 0.0) {
    qp.q.clear();
    qp.zeta.clear();
  }
  return qp;
}

ZProfile q_to_u(const QProfile& qp, double u_anchor, double cap_eps) {
  const std::size_t n = qp.q.size();
  ZProfile zp;
  zp.u.assign(n, u_anchor);
  zp.z = qp.zeta;
  if (n == 0) return zp;
  const double cap = 1.0 - cap_eps;
  for (double& z : zp.z) z = std::min(z, cap);
  for (std::size_t i = n - 1; i-- > 0;) {
    const double dq = qp.q[i + 1] - qp.q[i];
    const double gap = (1.0 - zp.z[i]) + (1.0 - zp.z[i + 1]);
    zp.u[i] = zp.u[i + 1] - 2.0 * dq / gap;
  }
  return zp;
}

HeightCurve reconstruct_height(const ZProfile& zp, double x_shift) {
  HeightCurve hc;
  const std::size_t n = zp.u.size();
  hc.total_drop = total_drop(zp);
  hc.right_offset = -x_shift;
  hc.left_offset = -x_shift - hc.total_drop;
  if (n == 0) return hc;
  // q at each node, accumulated from the right
  std::vector<double> q(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;)
    q[i] = q[i + 1] - 0.5 * ((1.0 - zp.z[i]) + (1.0 - zp.z[i + 1])) * (zp.u[i + 1] - zp.u[i]);
  const double inf = std::numeric_limits<double>::infinity();
  hc.vertices.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    HeightVertex v;
    v.u = zp.u[i];
    v.x = zp.u[i] - q[i] + x_shift;
    v.w = zp.z[i] > 0.0 ? 1.0 / zp.z[i] : inf;
    v.jump = i + 1 < n && zp.z[i] == 0.0 && zp.z[i + 1] == 0.0 && zp.u[i + 1] > zp.u[i];
    hc.vertices.push_back(v);
  }
  return hc;
}

double mean_x(const QProfile& qp, const ZProfile& zp) {
  if (qp.q.size() != zp.u.size()) throw std::invalid_argument("mean_x: node count mismatch");
  if (qp.total_drop <= 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < qp.q.size(); ++i) {
    const double xa = zp.u[i - 1] - qp.q[i - 1];
    const double xb = zp.u[i] - qp.q[i];
    acc += 0.5 * (xa + xb) * (qp.q[i] - qp.q[i - 1]);
  }
  return acc / qp.total_drop;
}

double level_crossing(const ZProfile& zp, double level) {
  for (std::size_t i = 0; i < zp.u.size(); ++i) {
    if (zp.z[i] >= level) {
      if (i == 0 || zp.z[i] == zp.z[i - 1]) return zp.u[i];
      const double t = (level - zp.z[i - 1]) / (zp.z[i] - zp.z[i - 1]);
      return zp.u[i - 1] + t * (zp.u[i] - zp.u[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace erodewave
