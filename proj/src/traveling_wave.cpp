#include "erodewave/traveling_wave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erodewave/error.hpp"
#include "erodewave/numerics.hpp"
#include "erodewave/stationary_profile.hpp"

namespace erodewave {

namespace {

constexpr double kRightSlopeOffset = 1e-6;
constexpr double kBlowUpSlope = 1e4;
constexpr double kOdeTol = 1e-11;
constexpr double kOverlapCap = 1e-3;
constexpr std::size_t kCrossCheckNodes = 20001;

// z_stat extended by 1 beyond D_ss, so the comparison is defined on all of [-D, 0].
double z_stat_ext(const ErosionModel& m, double delta, double dss) {
  if (delta >= dss) return 1.0;
  return z_stat(m, std::max(delta, 0.0));
}

}  // namespace

const char* to_string(WaveType t) {
  switch (t) {
    case WaveType::Type1: return "Type1";
    case WaveType::Type2: return "Type2";
    case WaveType::Type3: return "Type3";
    case WaveType::Type4: return "Type4";
  }
  return "?";
}

Classification classify(const ErosionModel& m, double D, double bracket_jitter) {
  if (!(D > 0.0)) throw DomainError("classify: total drop must be positive");
  const double dhk = d_hk(m);
  const double dss = d_ss(m);
  Classification c;
  if (std::isfinite(dhk) && std::abs(D - dhk) <= kTypeTwoTolerance) {
    c.regime_case = 2;
    c.q_plus = -D;
  } else if (!(D > dhk)) {
    c.regime_case = 1;
  } else if (std::abs(D - dss) <= kTypeTwoTolerance) {
    c.regime_case = 4;
    c.q_plus = 0.0;
  } else if (D > dss) {
    c.regime_case = 5;
  } else {
    c.regime_case = 3;
    // phi - z_stat is negative at -D_hk (phi = 0) and positive at 0 (phi = 1)
    auto gap = [&](double q) { return phi(m, q) - z_stat_ext(m, q + D, dss); };
    const double lo = -dhk, hi = 0.0;
    const double j = std::clamp(bracket_jitter, 0.0, 0.999);
    double a = lo, b = hi;
    if (j > 0.0) {
      // shrink toward the interior but keep a valid sign change
      const double a_try = lo + 0.5 * j * (hi - lo), b_try = hi - 0.25 * j * (hi - lo);
      if (gap(a_try) < 0.0) a = a_try;
      if (gap(b_try) > 0.0) b = b_try;
    }
    numerics::RootOptions opts;
    opts.residual_tol = 0.0;
    opts.x_tol = 1e-14;
    c.q_plus = numerics::bisect_root(gap, a, b, opts);
  }
  return c;
}

StationaryWave construct(const ErosionModel& m, double D) {
  if (!(D > 0.0)) throw DomainError("construct: total drop must be positive");
  const Classification c = classify(m, D);
  StationaryWave w;
  w.total_drop = D;
  w.regime_case = c.regime_case;
  switch (c.regime_case) {
    case 1:
      w.wave_type = WaveType::Type1;
      w.smooth_left = -D;
      break;
    case 2:
      w.wave_type = WaveType::Type2;
      w.smooth_left = -D;
      break;
    case 3:
      w.wave_type = WaveType::Type3;
      w.shock_right = *c.q_plus;
      w.smooth_left = *c.q_plus;
      break;
    default:
      w.wave_type = WaveType::Type4;
      w.shock_right = 0.0;
      w.smooth_left = 0.0;
      break;
  }
  return w;
}

double evaluate(const StationaryWave& w, const ErosionModel& m, double q) {
  const double D = w.total_drop;
  if (q < -D || q > 0.0) throw DomainError("evaluate: q outside [-D, 0]");
  if (q == -D) return 1.0;
  switch (w.wave_type) {
    case WaveType::Type1:
    case WaveType::Type2: return phi(m, q);
    case WaveType::Type3: return q <= *w.shock_right ? 0.0 : phi(m, q);
    case WaveType::Type4: return q < 0.0 ? 0.0 : 1.0;
  }
  return 1.0;
}

QProfile sample_profile(const StationaryWave& w, const ErosionModel& m, std::size_t n) {
  QProfile qp;
  qp.total_drop = w.total_drop;
  const double D = w.total_drop;
  auto push = [&](double q, double z) {
    qp.q.push_back(q);
    qp.zeta.push_back(z);
  };
  if (w.wave_type == WaveType::Type4) {
    push(-D, 0.0);
    push(0.0, 0.0);
    push(0.0, 1.0);
    return qp;
  }
  const double left = w.smooth_left;
  if (w.wave_type == WaveType::Type3) {
    push(-D, 0.0);
    push(left, 0.0);
  }
  push(left, phi(m, left));
  n = std::max<std::size_t>(n, 2);
  for (std::size_t k = 1; k < n; ++k) {
    const double q = left * (1.0 - static_cast<double>(k) / static_cast<double>(n - 1));
    push(q, phi(m, std::min(q, 0.0)));
  }
  return qp;
}

double physical_speed(const ErosionModel& m, const StationaryWave& w) {
  if (w.wave_type == WaveType::Type4) return psi(m, w.total_drop);
  return m.h1();
}

PhysicalWave physical_wave(const ErosionModel& m, const StationaryWave& w, double window,
                           std::size_t n) {
  if (!(window > 0.0) || n < 2) throw DomainError("physical_wave: need window > 0 and n >= 2");
  PhysicalWave pw;
  pw.speed = physical_speed(m, w);
  const double D = w.total_drop;
  auto& verts = pw.height_curve.vertices;
  pw.height_curve.total_drop = D;
  pw.height_curve.left_offset = -D;
  pw.height_curve.right_offset = 0.0;
  const double inf = std::numeric_limits<double>::infinity();

  if (w.wave_type == WaveType::Type4) {
    verts.push_back({-window, -window - D, 1.0, false});
    verts.push_back({0.0, -D, inf, true});
    verts.push_back({0.0, 0.0, 1.0, false});
    verts.push_back({window, window, 1.0, false});
    pw.diagnostic = "pure shock";
    return pw;
  }

  const double smooth_drop = -w.smooth_left;  // drop carried by the smooth part
  // dW/dtau with tau = window - xi; with z = 1/W the ODE reads W^2 h(z)^2 (W - 1) / h'(z)
  using DP = numerics::DormandPrince<2>;
  DP dp([&](double, const DP::State& y) {
    const double W = std::max(y[0], 1.0);
    const double z = 1.0 / W;
    const double hz = m.h(z);
    return DP::State{W * W * hz * hz * (W - 1.0) / m.h_prime(z), W - 1.0};
  });
  const double lambda = m.h1() * m.h1() / m.hprime1();
  DP::State y{1.0 + kRightSlopeOffset, kRightSlopeOffset / lambda};
  pw.phase_offset = y[1];
  double tau = 0.0;
  const double h_max = window / static_cast<double>(n);
  double h = std::min(1e-3, h_max);
  std::vector<std::pair<double, double>> rev;  // (xi, W) descending xi
  std::vector<double> drops;                   // s at each sample
  rev.emplace_back(window, y[0]);
  drops.push_back(y[1]);
  bool blew_up = false;
  for (int iter = 0; iter < 10'000'000; ++iter) {
    if (y[1] >= smooth_drop) break;
    if (h < 1e-14) throw NumericalError("physical_wave: step underflow at W=" + std::to_string(y[0]));
    auto trial = dp.trial(tau, y, h);
    const double err = DP::error_norm(y, trial, kOdeTol, kOdeTol);
    if (!(err <= 1.0) || !std::isfinite(trial.y[0])) {
      h = std::isfinite(err) ? DP::next_h(h, err) : 0.25 * h;
      continue;
    }
    if (trial.y[1] > smooth_drop) {
      // land exactly on the end of the smooth part
      double lo = 0.0, hi = h;
      for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (dp.trial(tau, y, mid).y[1] > smooth_drop) hi = mid; else lo = mid;
      }
      trial = dp.trial(tau, y, hi);
      trial.y[1] = smooth_drop;
      tau += hi;
    } else {
      tau += h;
      h = std::min(DP::next_h(h, err), h_max);
    }
    y = trial.y;
    rev.emplace_back(window - tau, y[0]);
    drops.push_back(y[1]);
    if (y[0] > kBlowUpSlope) {
      blew_up = true;
      break;
    }
  }
  const double reached = std::min(drops.back(), smooth_drop);
  const double jump = D - reached;
  if (blew_up) pw.diagnostic = "slope exceeded 1e4; remaining drop emitted as a jump";

  const double xi_stop = rev.back().first;
  const double tail = std::max(1.0, 0.2 * (window - xi_stop));
  verts.push_back({xi_stop - tail, xi_stop - tail - D, 1.0, false});
  const bool has_jump = jump > 1e-12;
  if (has_jump) verts.push_back({xi_stop, xi_stop - D, inf, true});
  for (std::size_t i = rev.size(); i-- > 0;) {
    pw.xi_samples.push_back(rev[i]);
    verts.push_back({rev[i].first, rev[i].first - drops[i], rev[i].second, false});
  }

  // Independent route: transform Z(q) to x = u - q on log-spaced nodes and compare
  // position differences over the region where both are well resolved.
  const double q_hi = phi_inverse(m, 1.0 - kOverlapCap);
  double q_lo = w.smooth_left;
  if (blew_up) q_lo = -reached;
  if (q_lo < q_hi) {
    QProfile qp;
    qp.total_drop = -q_lo;
    const double t_lo = std::log(-q_lo), t_hi = std::log(-q_hi);
    for (std::size_t k = 0; k < kCrossCheckNodes; ++k) {
      const double t = t_lo + (t_hi - t_lo) * static_cast<double>(k) / (kCrossCheckNodes - 1);
      const double q = k + 1 == kCrossCheckNodes ? q_hi : -std::exp(t);
      qp.q.push_back(q);
      qp.zeta.push_back(phi(m, q));
    }
    const ZProfile zp = q_to_u(qp, 0.0, 0.0);
    auto x_transform = [&](double q) {
      auto it = std::lower_bound(qp.q.begin(), qp.q.end(), q);
      std::size_t i = static_cast<std::size_t>(it - qp.q.begin());
      i = std::clamp<std::size_t>(i, 1, qp.q.size() - 1);
      const double t = (q - qp.q[i - 1]) / (qp.q[i] - qp.q[i - 1]);
      return (1.0 - t) * (zp.u[i - 1] - qp.q[i - 1]) + t * (zp.u[i] - qp.q[i]);
    };
    // reference: the ODE sample closest to q_hi from the left
    std::size_t ref = rev.size();
    for (std::size_t i = 0; i < rev.size(); ++i) {
      if (-drops[i] <= q_hi && -drops[i] >= q_lo) {
        ref = i;
        break;
      }
    }
    if (ref < rev.size()) {
      const double xw_ref = rev[ref].first, xt_ref = x_transform(-drops[ref]);
      double worst = 0.0;
      for (std::size_t i = ref; i < rev.size(); ++i) {
        const double q = -drops[i];
        if (q < q_lo || q > q_hi) continue;
        worst = std::max(worst, std::abs((rev[i].first - xw_ref) - (x_transform(q) - xt_ref)));
      }
      pw.cross_check_error = worst;
    }
  }
  return pw;
}

}  // namespace erodewave
