#include "erodewave/front_tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erodewave/error.hpp"
#include "erodewave/stationary_profile.hpp"

namespace erodewave {

namespace {

constexpr double kMonotoneTol = 1e-12;
constexpr double kDtFloor = 1e-14;
constexpr double kZetaFloor = 1e-3;
constexpr double kEmitMargin = 1e-12;
constexpr double kShockVanish = 1e-12;
constexpr double kCapEps = 1e-6;
constexpr std::size_t kL1Points = 4001;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Node list of the reconstruction together with the cumulative integral of h
// from each node to q = 0.
struct Reconstruction {
  QProfile profile;
  std::vector<double> cum;  // cum[k] = integral_{q_k}^0 h(zeta) dq

  double integral_from(const ErosionModel& m, double q) const {
    const auto& qs = profile.q;
    if (qs.empty() || q >= 0.0) return 0.0;
    auto it = std::upper_bound(qs.begin(), qs.end(), q);
    if (it == qs.end()) return 0.0;
    const auto i = static_cast<std::size_t>(it - qs.begin());  // qs[i] > q
    if (i == 0) return cum.front();
    const double qa = qs[i - 1], qb = qs[i];
    const double za = profile.zeta[i - 1], zb = profile.zeta[i];
    const double t = (q - qa) / (qb - qa);
    const double zq = za + t * (zb - za);
    return cum[i] + 0.5 * (m.h(zq) + m.h(zb)) * (qb - q);
  }
};

double shift_of(const ErosionModel& m, const Marker& mk) { return characteristic_shift(m, mk.q, mk.zeta); }

// Value on the characteristic family obtained by interpolating the shift linearly in q.
double shifted_value(const ErosionModel& m, double q, double qa, double sa, double qb, double sb) {
  const double t = qb > qa ? (q - qa) / (qb - qa) : 0.0;
  const double s = sa + t * (sb - sa);
  return phi_extended(m, q - s);
}

Reconstruction build(const MarkerField& st, const ErosionModel& m) {
  Reconstruction r;
  QProfile& p = r.profile;
  const double D = st.total_drop;
  p.total_drop = D;
  auto push = [&](double q, double z) {
    p.q.push_back(q);
    p.zeta.push_back(std::clamp(z, 0.0, 1.0));
  };
  const double left = st.shock_right ? *st.shock_right : -D;
  // markers at or left of the front are treated as already absorbed
  const bool open_left = !st.shock_right;
  auto first = std::find_if(st.markers.begin(), st.markers.end(), [&](const Marker& mk) {
    return mk.q > left || (open_left && mk.q == left);
  });
  const double s1 = first == st.markers.end() ? 0.0 : shift_of(m, *first);
  if (st.shock_right) {
    push(-D, 0.0);
    if (left > -D) push(left, 0.0);
    push(left, phi_extended(m, left - s1));
  } else if (first == st.markers.end() || first->q > -D) {
    push(-D, phi_extended(m, -D - s1));
  } else {
    push(first->q, first->zeta);
    ++first;
  }
  for (auto it = first; it != st.markers.end(); ++it) {
    if (it->q >= 0.0) break;
    if (it->q <= p.q.back()) continue;
    push(it->q, it->zeta);
  }
  push(0.0, 1.0);
  const std::size_t n = p.q.size();
  r.cum.assign(n, 0.0);
  for (std::size_t k = n - 1; k-- > 0;)
    r.cum[k] = r.cum[k + 1] + 0.5 * (m.h(p.zeta[k]) + m.h(p.zeta[k + 1])) * (p.q[k + 1] - p.q[k]);
  return r;
}

}  // namespace

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::absorbed: return "absorbed";
    case EventKind::clamped: return "clamped";
    case EventKind::emitted: return "emitted";
    case EventKind::shock_created: return "shock_created";
    case EventKind::shock_removed: return "shock_removed";
    case EventKind::seeded: return "seeded";
    case EventKind::refined: return "refined";
    case EventKind::merged: return "merged";
  }
  return "?";
}

double characteristic_shift(const ErosionModel& m, double q, double zeta) {
  return q - (1.0 / m.h1() - 1.0 / m.h(zeta));
}

SolverConfig normalized(SolverConfig c) {
  if (!(c.delta_q > 0.0)) throw DomainError("solver: delta_q must be positive");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw DomainError("solver: cfl must lie in (0, 1]");
  if (!(c.clamp_eps >= 0.0)) throw DomainError("solver: clamp_eps must be non-negative");
  if (c.boundary_gap <= 0.0) c.boundary_gap = c.delta_q;
  if (!(c.dt_max > 0.0)) throw DomainError("solver: dt_max must be positive");
  std::sort(c.snapshot_times.begin(), c.snapshot_times.end());
  return c;
}

MarkerField init_state(const Sampler& zeta0, double D, const SolverConfig& config_in) {
  const SolverConfig config = normalized(config_in);
  if (!(D > 0.0)) throw DomainError("init_state: total drop must be positive");
  const double z_end = zeta0(0.0);
  if (std::abs(z_end - 1.0) > kMonotoneTol)
    throw DomainError("init_state: zeta0(0) = " + std::to_string(z_end) + ", expected 1");
  const auto n = static_cast<std::size_t>(std::ceil(D / config.delta_q - 1e-9));
  const double dq = D / static_cast<double>(n);
  std::vector<Marker> samples;
  samples.reserve(n);
  double prev = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double q = k == n ? 0.0 : -D + static_cast<double>(k) * dq;
    const double z = zeta0(q);
    if (!(z >= -kMonotoneTol && z <= 1.0 + kMonotoneTol))
      throw DomainError("init_state: zeta0 outside [0, 1] at q=" + std::to_string(q));
    if (z < prev - kMonotoneTol)
      throw DomainError("init_state: zeta0 is not non-decreasing near q=" + std::to_string(q));
    prev = std::max(prev, z);
    samples.push_back({q, std::clamp(z, 0.0, 1.0)});
  }
  MarkerField st;
  st.total_drop = D;
  // a run of vanishing values next to -D becomes the initial shock
  std::size_t last_zero = 0;
  bool has_zero = false;
  for (std::size_t k = 0; k < samples.size() && samples[k].zeta < config.clamp_eps; ++k) {
    last_zero = k;
    has_zero = true;
  }
  if (has_zero) {
    double a = samples[last_zero].q;
    double b = last_zero + 1 < samples.size() ? samples[last_zero + 1].q : 0.0;
    for (int it = 0; it < 100 && b - a > 0.0; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      (zeta0(mid) < config.clamp_eps ? a : b) = mid;
    }
    st.shock_right = a;
  }
  for (const auto& s : samples) {
    if (s.q >= 0.0) continue;
    if (st.shock_right && s.q <= *st.shock_right) continue;
    st.markers.push_back(s);
  }
  return st;
}

QProfile reconstruct(const MarkerField& st, const ErosionModel& m) { return build(st, m).profile; }

double front_state(const MarkerField& st, const ErosionModel& m) {
  if (!st.shock_right) throw DomainError("front_state: no shock present");
  const double qp = *st.shock_right;
  auto first = std::find_if(st.markers.begin(), st.markers.end(),
                            [qp](const Marker& mk) { return mk.q > qp; });
  const double s1 = first == st.markers.end() ? 0.0 : shift_of(m, *first);
  return phi_extended(m, qp - s1);
}

double integral_F(const MarkerField& st, const ErosionModel& m, double q) {
  if (q < -st.total_drop || q > 0.0) throw DomainError("integral_F: q outside [-D, 0]");
  return std::exp(build(st, m).integral_from(m, q));
}

MarkerVelocity characteristic_velocity(const ErosionModel& m, double zeta, double F) {
  const double a = (1.0 - zeta) * (1.0 - zeta) * F;
  const double hz = m.h(zeta);
  return {-a * m.h_prime(zeta), -a * hz * hz};
}

MarkerVelocity marker_velocity(const MarkerField& st, const ErosionModel& m, std::size_t i) {
  if (i >= st.markers.size()) throw DomainError("marker_velocity: index out of range");
  const auto& mk = st.markers[i];
  return characteristic_velocity(m, mk.zeta, integral_F(st, m, mk.q));
}

double shock_right_speed(const ErosionModel& m, double F, double z_plus, double delta) {
  if (z_plus <= 0.0) return 0.0;
  return F * (1.0 - z_plus) / z_plus * (psi(m, std::max(delta, 0.0)) - m.h(z_plus));
}

double shock_right_speed(const MarkerField& st, const ErosionModel& m, std::string* diagnostic) {
  if (!st.shock_right) throw DomainError("shock_right_speed: no shock present");
  const double zp = front_state(st, m);
  if (zp <= 0.0) {
    if (diagnostic) *diagnostic = "degenerate front: z+ = 0";
    return 0.0;
  }
  const double qp = *st.shock_right;
  return shock_right_speed(m, integral_F(st, m, qp), zp, qp + st.total_drop);
}

double kink_speed(const ErosionModel& m, double F, double z_minus, double z_plus) {
  if (!(z_minus > z_plus && z_plus > 0.0)) throw DomainError("kink_speed: need z- > z+ > 0");
  return -F * (1.0 - z_plus) * (1.0 - z_minus) * (m.h(z_minus) - m.h(z_plus)) / (z_minus - z_plus);
}

double hyperkink_speed(const ErosionModel& m, double F, double z_minus) {
  if (!(z_minus > 0.0)) throw DomainError("hyperkink_speed: need z- > 0");
  return -F * (1.0 - z_minus) * (m.h(z_minus) - m.h0()) / z_minus;
}

namespace {

struct Rates {
  std::vector<MarkerVelocity> markers;
  double front = 0.0;
  double anchor = 0.0;
};

Rates rates(const MarkerField& st, const ErosionModel& m) {
  const Reconstruction r = build(st, m);
  Rates out;
  out.markers.reserve(st.markers.size());
  for (const auto& mk : st.markers) {
    const double F = std::exp(r.integral_from(m, mk.q));
    out.markers.push_back(characteristic_velocity(m, std::clamp(mk.zeta, 0.0, 1.0), F));
  }
  if (st.shock_right) {
    const double qp = *st.shock_right;
    const auto i = static_cast<std::size_t>(
        std::upper_bound(r.profile.q.begin(), r.profile.q.end(), qp) - r.profile.q.begin());
    const double delta = qp + st.total_drop;
    double zp = i > 0 ? r.profile.zeta[i - 1] : 0.0;
    // The speed blows up like 1/z+ at the foot of a profile while the time spent there
    // vanishes. A floor below z_stat keeps the sign and removes the stiffness.
    const double dss = d_ss(m);
    const double zs = delta < dss ? z_stat(m, std::max(delta, 0.0)) : 1.0;
    zp = std::max(zp, std::min(kZetaFloor, 0.5 * zs));
    const double F = std::exp(r.integral_from(m, qp));
    out.front = shock_right_speed(m, F, zp, delta);
  }
  out.anchor = std::expm1(r.cum.front()) / st.total_drop;
  return out;
}

MarkerField advance(const MarkerField& st, const Rates& a, const Rates* b, double dt) {
  MarkerField next = st;
  const double w = b ? 0.5 * dt : dt;
  for (std::size_t i = 0; i < next.markers.size(); ++i) {
    const MarkerVelocity& va = a.markers[i];
    double dq = va.qdot, dz = va.zetadot;
    if (b) {
      dq += b->markers[i].qdot;
      dz += b->markers[i].zetadot;
    }
    next.markers[i].q += w * dq;
    next.markers[i].zeta += w * dz;
  }
  if (next.shock_right) *next.shock_right += w * (a.front + (b ? b->front : 0.0));
  next.anchor_x += w * (a.anchor + (b ? b->anchor : 0.0));
  next.time += dt;
  return next;
}

double stable_dt(const MarkerField& st, const Rates& k, const SolverConfig& c) {
  double dt = c.dt_max;
  const auto& mk = st.markers;
  for (std::size_t i = 0; i < mk.size(); ++i) {
    const MarkerVelocity& v = k.markers[i];
    if (v.zetadot < 0.0) dt = std::min(dt, c.cfl * std::max(mk[i].zeta, kZetaFloor) / -v.zetadot);
    if (i + 1 < mk.size()) {
      const double closing = v.qdot - k.markers[i + 1].qdot;
      if (closing > 0.0) dt = std::min(dt, c.cfl * (mk[i + 1].q - mk[i].q) / closing);
    }
  }
  if (st.shock_right && k.front != 0.0) {
    const double qp = *st.shock_right;
    double gap = c.delta_q;
    if (!mk.empty() && mk.front().q > qp) gap = std::max(gap, mk.front().q - qp);
    dt = std::min(dt, c.cfl * gap / std::abs(k.front));
  }
  return dt;
}

void post_process(MarkerField& st, const ErosionModel& m, const SolverConfig& c,
                  std::vector<Event>& ev) {
  const double D = st.total_drop;
  const double t = st.time;
  auto& mk = st.markers;
  for (auto& x : mk) x.zeta = std::min(x.zeta, 1.0);

  // (a) vanishing values join the shock
  // markers already past the left boundary are absorbed below instead
  std::size_t n_clamp = 0;
  for (std::size_t i = 0; i < mk.size(); ++i)
    if (mk[i].zeta < c.clamp_eps) n_clamp = i + 1;
  if (n_clamp > 0 && mk[n_clamp - 1].q > -D + kShockVanish) {
    const double q_new = std::clamp(mk[n_clamp - 1].q, -D, 0.0);
    for (std::size_t i = 0; i < n_clamp; ++i) ev.push_back({t, EventKind::clamped, mk[i].q, mk[i].zeta});
    if (!st.shock_right) {
      st.shock_right = q_new;
      ev.push_back({t, EventKind::shock_created, q_new, 0.0});
    } else {
      st.shock_right = std::max(*st.shock_right, q_new);
    }
    mk.erase(mk.begin(), mk.begin() + static_cast<std::ptrdiff_t>(n_clamp));
  }

  // (b) absorption into the shock or the left boundary
  if (st.shock_right) st.shock_right = std::clamp(*st.shock_right, -D, 0.0);
  const double left = st.shock_right ? *st.shock_right : -D;
  std::size_t n_abs = 0;
  // a marker sitting exactly on -D without a shock is the boundary node itself
  auto past = [&](double q) { return st.shock_right ? q <= left : q < left; };
  while (n_abs < mk.size() && past(mk[n_abs].q)) {
    ev.push_back({t, EventKind::absorbed, mk[n_abs].q, mk[n_abs].zeta});
    ++n_abs;
  }
  mk.erase(mk.begin(), mk.begin() + static_cast<std::ptrdiff_t>(n_abs));

  // (c) tangential emission at an inadmissible right front
  if (st.shock_right) {
    const double qp = *st.shock_right;
    const double delta = qp + D;
    const double dss = d_ss(m);
    if (delta < dss) {
      const double za = z_adm(m, std::max(delta, 0.0));
      const double zp = front_state(st, m);
      if (zp > za + kEmitMargin && qp < 0.0) {
        const double q_emit = std::min(qp + 1e-12 * std::max(1.0, D), 0.5 * qp);
        mk.insert(mk.begin(), {q_emit, za});
        ev.push_back({t, EventKind::emitted, q_emit, za});
      }
    }
  }

  // (d) re-seed the fan at q = 0
  const double b = c.boundary_gap;
  const double q_last = mk.empty() ? left : mk.back().q;
  if (-q_last > b) {
    const double s_last = mk.empty() ? 0.0 : shift_of(m, mk.back());
    const double q_new = -0.5 * b;
    const double z_new = shifted_value(m, q_new, q_last, s_last, 0.0, 0.0);
    mk.push_back({q_new, z_new});
    ev.push_back({t, EventKind::seeded, q_new, z_new});
  }

  // (d') split wide interior gaps along the interpolated characteristic family
  if (c.refine_interior) {
    std::vector<Marker> refined;
    refined.reserve(mk.size());
    for (std::size_t i = 0; i < mk.size(); ++i) {
      if (i > 0) {
        const Marker& a = mk[i - 1];
        const Marker& bm = mk[i];
        const double gap = bm.q - a.q;
        if (gap > 2.0 * c.delta_q) {
          const auto pieces = static_cast<std::size_t>(std::ceil(gap / c.delta_q));
          const double sa = shift_of(m, a), sb = shift_of(m, bm);
          for (std::size_t k = 1; k < pieces; ++k) {
            const double q = a.q + gap * static_cast<double>(k) / static_cast<double>(pieces);
            const double z = std::clamp(shifted_value(m, q, a.q, sa, bm.q, sb), a.zeta, bm.zeta);
            refined.push_back({q, z});
            ev.push_back({t, EventKind::refined, q, z});
          }
        }
      }
      refined.push_back(mk[i]);
    }
    mk.swap(refined);
  }

  // (e) merge crowded or crossed markers, keeping the left one
  {
    std::vector<Marker> kept;
    kept.reserve(mk.size());
    for (const auto& x : mk) {
      if (!kept.empty() && x.q - kept.back().q < c.delta_q / 100.0) {
        ev.push_back({t, EventKind::merged, x.q, x.zeta});
        continue;
      }
      if (!kept.empty() && x.zeta < kept.back().zeta) {
        Marker fixed = x;
        fixed.zeta = kept.back().zeta;
        kept.push_back(fixed);
        continue;
      }
      kept.push_back(x);
    }
    mk.swap(kept);
  }

  // (f) a shock that has shrunk to nothing disappears
  if (st.shock_right && *st.shock_right <= -D + kShockVanish) {
    ev.push_back({t, EventKind::shock_removed, *st.shock_right, 0.0});
    st.shock_right.reset();
  }
}

}  // namespace

StepOutcome step(const MarkerField& state, const ErosionModel& m, const SolverConfig& config_in,
                 double dt_cap) {
  const SolverConfig c = normalized(config_in);
  const Rates k1 = rates(state, m);
  double dt = stable_dt(state, k1, c);
  if (dt_cap > 0.0) dt = std::min(dt, dt_cap);
  if (!(dt >= kDtFloor))
    throw NumericalError("step: time step " + std::to_string(dt) + " below 1e-14 at t=" +
                         std::to_string(state.time) + " with " +
                         std::to_string(state.markers.size()) + " markers");
  const MarkerField predictor = advance(state, k1, nullptr, dt);
  const Rates k2 = rates(predictor, m);
  StepOutcome out;
  out.dt = dt;
  out.state = advance(state, k1, &k2, dt);
  post_process(out.state, m, c, out.events);
  return out;
}

namespace {

// Integrates |a - b| over [lo, hi] with composite Simpson; `a` and `b` take a side flag
// (true = right limit) used at the interval ends.
template <class Fa, class Fb>
double simpson_abs(Fa a, Fb b, double lo, double hi, std::size_t n) {
  if (hi <= lo) return 0.0;
  if (n % 2 == 1) ++n;
  n = std::max<std::size_t>(n, 2);
  const double h = (hi - lo) / static_cast<double>(n);
  double acc = std::abs(a(lo, true) - b(lo, true)) + std::abs(a(hi, false) - b(hi, false));
  for (std::size_t k = 1; k < n; ++k) {
    const double q = lo + h * static_cast<double>(k);
    acc += (k % 2 == 1 ? 4.0 : 2.0) * std::abs(a(q, false) - b(q, false));
  }
  return acc * h / 3.0;
}

template <class Fa, class Fb>
double l1_split(Fa a, Fb b, double D, std::vector<double> cuts) {
  cuts.push_back(-D);
  cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double lo = std::max(cuts[i - 1], -D), hi = std::min(cuts[i], 0.0);
    if (hi <= lo) continue;
    const auto n = static_cast<std::size_t>(std::ceil((kL1Points - 1) * (hi - lo) / D));
    total += simpson_abs(a, b, lo, hi, n);
  }
  return total;
}

}  // namespace

double l1_distance(const QProfile& a, const QProfile& b) {
  if (std::abs(a.total_drop - b.total_drop) > 1e-9 * std::max(1.0, a.total_drop))
    throw DomainError("l1_distance: total drops differ");
  auto fa = [&](double q, bool right) { return right ? a.eval_right(q) : a.eval(q); };
  auto fb = [&](double q, bool right) { return right ? b.eval_right(q) : b.eval(q); };
  std::vector<double> cuts = a.jumps();
  for (double q : b.jumps()) cuts.push_back(q);
  return l1_split(fa, fb, a.total_drop, cuts);
}

double l1_distance(const MarkerField& st, const StationaryWave& w, const ErosionModel& m) {
  if (std::abs(st.total_drop - w.total_drop) > 1e-9 * std::max(1.0, st.total_drop))
    throw DomainError("l1_distance: total drops differ");
  const QProfile p = reconstruct(st, m);
  const double D = st.total_drop;
  auto fa = [&](double q, bool right) { return right ? p.eval_right(q) : p.eval(q); };
  auto fb = [&](double q, bool right) {
    if (right && w.shock_right && q == *w.shock_right) return q < 0.0 ? phi(m, q) : 1.0;
    if (right && q == -D) return w.shock_right ? 0.0 : phi(m, -D);
    if (!right && q == 0.0 && w.wave_type == WaveType::Type4) return 0.0;
    return evaluate(w, m, q);
  };
  std::vector<double> cuts = p.jumps();
  if (w.shock_right) cuts.push_back(*w.shock_right);
  return l1_split(fa, fb, D, cuts);
}

double total_variation(const MarkerField& st, const ErosionModel& m) {
  const QProfile p = reconstruct(st, m);
  if (p.zeta.empty()) return 0.0;
  double tv = std::abs(1.0 - p.zeta.front());
  for (std::size_t i = 1; i < p.zeta.size(); ++i) tv += std::abs(p.zeta[i] - p.zeta[i - 1]);
  return tv;
}

ZProfile anchored_profile(const MarkerField& st, const ErosionModel& m) {
  const QProfile qp = reconstruct(st, m);
  ZProfile zp = q_to_u(qp, 0.0, kCapEps);
  const double shift = st.anchor_x - mean_x(qp, zp);
  for (double& u : zp.u) u += shift;
  return zp;
}

RunResult run(const MarkerField& initial, const ErosionModel& m, const SolverConfig& config_in,
              const StationaryWave* reference) {
  const SolverConfig c = normalized(config_in);
  if (!(c.t_end >= 0.0)) throw DomainError("run: t_end must be non-negative");
  RunResult res;
  std::vector<double> snaps;
  for (double t : c.snapshot_times)
    if (t >= 0.0 && t <= c.t_end) snaps.push_back(t);
  if (snaps.empty()) {
    snaps.push_back(0.0);
    if (c.t_end > 0.0) snaps.push_back(c.t_end);
  }
  std::vector<double> series_times;
  if (c.series_interval > 0.0) {
    const auto n = static_cast<std::size_t>(std::floor(c.t_end / c.series_interval + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) series_times.push_back(static_cast<double>(k) * c.series_interval);
  }

  MarkerField st = initial;
  st.time = 0.0;
  std::size_t next_snap = 0, next_series = 0;
  double prev_level = kNaN, prev_t = kNaN;
  res.stats.dt_min = std::numeric_limits<double>::infinity();
  res.stats.max_markers = st.markers.size();

  auto record = [&]() {
    const double tol = 1e-12 * std::max(1.0, c.t_end);
    while (next_snap < snaps.size() && std::abs(snaps[next_snap] - st.time) <= tol) {
      MarkerField copy = st;
      copy.time = snaps[next_snap];
      res.snapshots.push_back({snaps[next_snap], copy});
      ++next_snap;
    }
    while (next_series < series_times.size() && std::abs(series_times[next_series] - st.time) <= tol) {
      SeriesPoint sp;
      sp.t = series_times[next_series];
      sp.l1_distance = reference ? l1_distance(st, *reference, m) : kNaN;
      sp.shock_front = st.shock_right ? *st.shock_right : kNaN;
      sp.level_position = level_crossing(anchored_profile(st, m), c.level);
      sp.speed_estimate = std::isnan(prev_t) ? kNaN : (sp.level_position - prev_level) / (sp.t - prev_t);
      sp.total_variation = total_variation(st, m);
      prev_level = sp.level_position;
      prev_t = sp.t;
      res.series.push_back(sp);
      ++next_series;
    }
  };

  record();
  while (st.time < c.t_end - 1e-12 * std::max(1.0, c.t_end)) {
    if (res.stats.steps >= c.max_steps) throw NumericalError("run: step budget exhausted");
    double target = c.t_end;
    if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
    if (next_series < series_times.size()) target = std::min(target, series_times[next_series]);
    StepOutcome out = step(st, m, c, target - st.time);
    st = std::move(out.state);
    if (std::abs(st.time - target) <= 1e-12 * std::max(1.0, c.t_end)) st.time = target;
    res.events.insert(res.events.end(), out.events.begin(), out.events.end());
    ++res.stats.steps;
    res.stats.dt_min = std::min(res.stats.dt_min, out.dt);
    res.stats.dt_max = std::max(res.stats.dt_max, out.dt);
    res.stats.max_markers = std::max(res.stats.max_markers, st.markers.size());
    record();
  }
  if (res.stats.steps == 0) res.stats.dt_min = 0.0;
  res.final_state = st;
  return res;
}

}  // namespace erodewave
