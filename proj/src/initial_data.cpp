#include "erodewave/initial_data.hpp"

#include <algorithm>
#include <cmath>

#include "erodewave/error.hpp"

namespace erodewave {

namespace {

constexpr double kTailDrop = 1e-16;

}  // namespace

double InitialPiece::z(double u) const {
  if (kind == Kind::constant) return value;
  return base + amp * std::exp(rate * (u + offset));
}

double InitialPiece::drop(double a, double b) const {
  if (b <= a) return 0.0;
  if (kind == Kind::constant) return (1.0 - value) * (b - a);
  const double ea = std::exp(rate * (a + offset));
  const double eb = std::isinf(b) ? 0.0 : std::exp(rate * (b + offset));
  const double lin = std::isinf(b) ? 0.0 : (1.0 - base) * (b - a);
  return lin - amp * (eb - ea) / rate;
}

InitialData::InitialData(std::vector<InitialPiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ModelError("initial data needs at least one piece");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.upper > p.lower)) throw ModelError("initial data piece has empty range");
    if (i + 1 < pieces_.size() && pieces_[i + 1].lower != p.upper)
      throw ModelError("initial data pieces must be contiguous");
    if (std::isinf(p.upper)) {
      if (i + 1 != pieces_.size()) throw ModelError("only the last piece may be unbounded");
      const bool to_one = p.kind == InitialPiece::Kind::exponential ? (p.base == 1.0 && p.rate < 0.0)
                                                                   : p.value == 1.0;
      if (!to_one) throw ModelError("unbounded last piece must tend to z = 1");
    }
    if (p.kind == InitialPiece::Kind::exponential && p.rate == 0.0)
      throw ModelError("exponential piece needs a non-zero rate");
  }
  total_drop_ = q_of_u(pieces_.front().lower) * -1.0;
  // monotone, in-range check on a fine grid
  double prev = 0.0;
  const double lo = pieces_.front().lower;
  const double hi = std::isinf(pieces_.back().upper) ? pieces_.back().lower + 50.0 : pieces_.back().upper;
  for (int k = 0; k <= 20000; ++k) {
    const double u = lo + (hi - lo) * k / 20000.0;
    const double v = k == 0 ? pieces_.front().z(lo) : z(u);
    if (v < -1e-12 || v > 1.0 + 1e-12) throw ModelError("initial data leaves [0, 1]");
    if (v < prev - 1e-12) throw ModelError("initial data is not non-decreasing");
    prev = v;
  }
}

double InitialData::z(double u) const {
  if (u <= pieces_.front().lower) return 1.0;
  for (const auto& p : pieces_)
    if (u > p.lower && u <= p.upper) return p.z(u);
  return 1.0;
}

double InitialData::q_of_u(double u) const {
  double d = 0.0;
  for (const auto& p : pieces_) {
    const double a = std::max(u, p.lower);
    d += p.drop(a, p.upper);
  }
  return -d;
}

double InitialData::u_of_q(double q) const {
  double lo = pieces_.front().lower;
  double hi = lo + 1.0;
  while (q_of_u(hi) < q && -q_of_u(hi) > kTailDrop) hi = lo + 2.0 * (hi - lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (q_of_u(mid) < q ? lo : hi) = mid;
  }
  return hi;
}

double InitialData::zeta(double q) const {
  if (q >= 0.0) return 1.0;
  if (q <= -total_drop_) return std::clamp(pieces_.front().z(pieces_.front().lower), 0.0, 1.0);
  return std::clamp(z(u_of_q(q)), 0.0, 1.0);
}

double InitialData::mean_x() const {
  // integrate x = u - q against dq = (1 - z) du piece by piece
  const double scale = std::max(1.0, total_drop_);
  double acc = 0.0;
  for (const auto& p : pieces_) {
    double hi = p.upper;
    if (std::isinf(hi)) {
      hi = p.lower + 1.0;
      while (p.drop(hi, p.upper) > 1e-15 * scale) hi = p.lower + 2.0 * (hi - p.lower);
    }
    const int n = 20000;
    const double h = (hi - p.lower) / n;
    double part = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double u = p.lower + h * k;
      const double wgt = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      part += wgt * (u - q_of_u(u)) * (1.0 - p.z(u));
    }
    acc += part * h / 3.0;
  }
  return acc / total_drop_;
}

ZProfile InitialData::sample(double u_lo, double u_hi, std::size_t n) const {
  ZProfile zp;
  n = std::max<std::size_t>(n, 2);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = u_lo + (u_hi - u_lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    zp.u.push_back(u);
    zp.z.push_back(z(u));
  }
  return zp;
}

InitialData experiment_initial_data() {
  InitialPiece gap;
  gap.kind = InitialPiece::Kind::constant;
  gap.lower = 0.0;
  gap.upper = 0.6;
  gap.value = 0.0;
  InitialPiece tail;
  tail.kind = InitialPiece::Kind::exponential;
  tail.lower = 0.6;
  tail.base = 1.0;
  tail.amp = -1.0;
  tail.rate = -0.5;
  tail.offset = 0.11;
  return InitialData({gap, tail});
}

}  // namespace erodewave
