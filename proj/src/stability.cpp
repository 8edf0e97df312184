#include "erodewave/stability.hpp"

#include <algorithm>
#include <cmath>

#include "erodewave/error.hpp"
#include "erodewave/numerics.hpp"
#include "erodewave/stationary_profile.hpp"
#include "erodewave/transforms.hpp"

namespace erodewave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kGrid = 4001;
constexpr std::size_t kQuadrature = 20001;

double min_h_prime(const ErosionModel& model) {
  return numerics::grid_min([&](double z) { return model.h_prime(z); }, 0.0, 1.0, 1001).value;
}

// z_stat extended by 1 past D_ss, where every state is below the stationary value.
double z_stat_ext(const ErosionModel& model, double delta, double dss) {
  if (delta >= dss) return 1.0;
  return z_stat(model, delta);
}

double stage1_time(const ErosionModel& model, double D, double zeta_o) {
  if (zeta_o >= 1.0) return kInf;
  return D / ((1.0 - zeta_o) * min_h_prime(model));
}

// Right-front speed of a shock whose right state is z, with F = 1.
double front_speed(const ErosionModel& model, double D, double q, double z) {
  const double gap = psi(model, q + D) - model.h(z);
  if (z <= 0.0) return gap > 0.0 ? kInf : -kInf;
  return (1.0 - z) / z * gap;
}

// Time for the front to travel from a to b (either direction) as the integral of dq / |speed|.
// Returns +inf if the speed vanishes or points the wrong way inside the interval.
double travel_time(const std::function<double(double)>& speed, double a, double b) {
  if (a == b) return 0.0;
  const double dir = b > a ? 1.0 : -1.0;
  const std::size_t n = kQuadrature;
  const double hstep = (b - a) / static_cast<double>(n - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = a + hstep * static_cast<double>(i);
    const double v = speed(q) * dir;
    if (!(v > 0.0)) return kInf;
    const double w = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w / v;
  }
  return sum * std::abs(hstep) / 3.0;
}

}  // namespace

const char* to_string(EnvelopeKind k) {
  switch (k) {
    case EnvelopeKind::upper_stage1: return "upper_stage1";
    case EnvelopeKind::upper_stage2: return "upper_stage2";
    case EnvelopeKind::lower_stage1: return "lower_stage1";
    case EnvelopeKind::lower_stage2: return "lower_stage2";
  }
  return "unknown";
}

double envelope_constant(const ErosionModel& model) {
  const ProfileConstants pc = profile_constants(model);
  return 2.0 * pc.max_h2_over_hp / pc.kappa;
}

Envelope upper_envelope(const ErosionModel& model, double D, double eps, const Sampler& zeta0) {
  if (!(eps > 0.0) || eps >= D) throw ModelError("upper_envelope: need 0 < eps < D");
  Envelope env;
  env.kind = EnvelopeKind::upper_stage1;
  env.total_drop = D;
  env.eps = eps;
  env.switch_point = -eps;

  bool below_phi = true;
  for (int i = 1; i < 200 && below_phi; ++i) {
    const double q = -eps * static_cast<double>(i) / 200.0;
    below_phi = zeta0(q) <= phi_extended(model, q) + 1e-12;
  }
  env.uses_phi = below_phi;
  if (below_phi) {
    env.curve = [model, D](double q) { return q <= -D ? 1.0 : phi_extended(model, q); };
  } else {
    env.curve = [model, D, eps](double q) {
      if (q <= -D || q > -eps) return 1.0;
      return phi_extended(model, q + eps);
    };
  }
  env.zeta_o = zeta0(-eps);
  env.stage1_time = stage1_time(model, D, env.zeta_o);
  env.validity_time = env.stage1_time;
  return env;
}

Envelope upper_stage2(const ErosionModel& model, double D, double eps, const Envelope& stage1,
                      std::optional<double> initial_front) {
  const double dhk = d_hk(model);
  if (!(D > dhk)) throw ModelError("upper_stage2: regime mismatch, needs D > D_hk");
  if (stage1.kind != EnvelopeKind::upper_stage1) throw ModelError("upper_stage2: needs a stage-1 upper envelope");
  const StationaryWave wave = construct(model, D);
  const double dss = d_ss(model);

  Envelope env;
  env.kind = EnvelopeKind::upper_stage2;
  env.uses_phi = stage1.uses_phi;
  env.total_drop = D;
  env.eps = eps;
  env.zeta_o = stage1.zeta_o;
  env.stage1_time = stage1.stage1_time;
  env.q_plus = wave.shock_right.value_or(-D);
  env.constant = envelope_constant(model);
  const double q_hat = env.q_plus - env.constant * eps;
  env.switch_point = q_hat;

  const std::function<double(double)> phi_plus = stage1.curve;
  env.curve = [phi_plus, D, q_hat](double q) {
    if (q <= -D) return 1.0;
    if (q <= q_hat) return 0.0;
    return phi_plus(q);
  };

  double start = -dhk - eps;
  if (initial_front && *initial_front > start) {
    start = *initial_front;
    env.note = "comparison front started at the actual shock front";
  }
  if (start <= -D) {
    start = -D;
    env.note = "comparison front started at -D";
  }
  env.front_start = start;

  auto gap = [&](double q) { return z_stat_ext(model, q + D, dss) - phi_plus(q); };
  if (q_hat <= start) {
    // The comparison front already sits right of q-hat, so stage 2 is immediate.
    env.ode_time = 0.0;
    env.v_eps = q_hat > -D ? gap(q_hat) : kInf;
    env.bound_time = 0.0;
  } else {
    auto speed = [&](double q) { return front_speed(model, D, q, phi_plus(q)); };
    env.ode_time = travel_time(speed, start, q_hat);
    env.v_eps = numerics::grid_min(gap, start, q_hat, kGrid, 1e-8).value;
    const double denom = (1.0 - phi_extended(model, env.q_plus)) * min_h_prime(model) * env.v_eps;
    env.bound_time = denom > 0.0 ? (dhk + eps) / denom : kInf;
  }

  const double t2 = std::isfinite(env.bound_time) ? std::max(env.ode_time, env.bound_time) : env.ode_time;
  if (!std::isfinite(env.bound_time)) {
    env.note += env.note.empty() ? "" : "; ";
    env.note += "closed-form bound degenerate, ODE time used";
  }
  env.validity_time = stage1.validity_time + t2;
  return env;
}

Envelope lower_envelope(const ErosionModel& model, double D, double eps, const Sampler& zeta0) {
  if (!(eps > 0.0)) throw ModelError("lower_envelope: eps must be positive");
  if (!(D < d_ss(model))) throw ModelError("lower_envelope: regime mismatch, needs D < D_ss");
  Envelope env;
  env.kind = EnvelopeKind::lower_stage1;
  env.total_drop = D;
  env.eps = eps;

  auto diff = [&](double q) { return phi_extended(model, q - eps) - z_adm(model, q + D); };
  const double left = -D + D * 1e-9;
  double q1 = -D;
  if (diff(0.0) < 0.0) {
    q1 = 0.0;
    env.note = "shifted phi below z_adm at q = 0";
  } else {
    double prev = 0.0;
    for (std::size_t i = 1; i < kGrid; ++i) {
      const double q = -D * static_cast<double>(i) / static_cast<double>(kGrid - 1);
      const double qq = std::max(q, left);
      if (diff(qq) < 0.0) {
        q1 = numerics::bisect_root(diff, qq, prev);
        break;
      }
      prev = qq;
    }
  }
  env.switch_point = q1;

  env.curve = [model, D, eps, q1](double q) {
    if (q <= -D) return 1.0;
    if (q < q1) return 0.0;
    return phi_extended(model, q - eps);
  };

  // Left-most grid point q_o with zeta0 >= phi^- on [q_o, 0].
  double q_o = 0.0;
  for (std::size_t i = 0; i < kGrid; ++i) {
    const double q = std::max(-D * static_cast<double>(i) / static_cast<double>(kGrid - 1), left);
    if (zeta0(q) + 1e-12 < env.curve(q)) break;
    q_o = q;
  }
  env.zeta_o = zeta0(q_o);
  env.stage1_time = stage1_time(model, D, env.zeta_o);
  env.validity_time = env.stage1_time;
  return env;
}

Envelope lower_stage2(const ErosionModel& model, double D, double eps, const Envelope& stage1) {
  const double dss = d_ss(model);
  if (!(D < dss)) throw ModelError("lower_stage2: regime mismatch, needs D < D_ss");
  if (stage1.kind != EnvelopeKind::lower_stage1) throw ModelError("lower_stage2: needs a stage-1 lower envelope");
  const double q1 = stage1.switch_point;
  if (!(q1 > -D)) throw ModelError("lower_stage2: regime mismatch, needs q1 > -D");
  const StationaryWave wave = construct(model, D);
  const bool type1 = wave.wave_type == WaveType::Type1;

  Envelope env;
  env.kind = EnvelopeKind::lower_stage2;
  env.total_drop = D;
  env.eps = eps;
  env.zeta_o = stage1.zeta_o;
  env.stage1_time = stage1.stage1_time;
  env.q_plus = wave.shock_right.value_or(-D);
  env.constant = envelope_constant(model);
  const double q_hat = type1 ? -D : std::min(env.q_plus + env.constant * eps, 0.0);
  env.switch_point = q_hat;
  env.front_start = q1;

  env.curve = [model, D, eps, q_hat](double q) {
    if (q <= -D) return 1.0;
    if (q <= q_hat) return 0.0;
    return phi_extended(model, q - eps);
  };

  auto speed = [&](double q) { return front_speed(model, D, q, phi_extended(model, q - eps)); };
  const double tiny = D * 1e-9;
  env.merge_time = travel_time(speed, q1, -D + tiny);

  const double target = std::max(q_hat, -D + tiny);
  // Types 1-2 take q+ = -D, so the minimisation starts at -D + C2 eps for every type.
  const double v_lo = env.q_plus + env.constant * eps;
  env.ode_time = target >= q1 ? 0.0 : travel_time(speed, q1, target);
  if (v_lo >= q1) {
    env.bound_time = 0.0;
    env.v_eps = kInf;
  } else {
    auto gap = [&](double q) { return z_stat_ext(model, q + D, dss) - phi_extended(model, q - eps); };
    env.v_eps = -numerics::grid_max(gap, v_lo, q1, kGrid, 1e-8).value;
    const double denom = (1.0 - phi_extended(model, q1)) * min_h_prime(model) * env.v_eps;
    env.bound_time = denom > 0.0 ? (d_hk(model) + eps) / denom : kInf;
  }
  const double t2 = std::isfinite(env.bound_time) ? std::max(env.ode_time, env.bound_time) : env.ode_time;
  if (!std::isfinite(env.bound_time)) env.note = "closed-form bound degenerate, ODE time used";
  env.validity_time = stage1.validity_time + t2;
  return env;
}

double envelope_l1(const Envelope& env, const StationaryWave& wave, const ErosionModel& model, std::size_t n) {
  if (n % 2 == 0) ++n;
  const double D = env.total_drop;
  const double hstep = D / static_cast<double>(n - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Offset by a quarter step so no node lands on a jump.
    const double q = std::min(-D + hstep * (static_cast<double>(i) + 0.25), 0.0);
    const double w = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * std::abs(env(q) - evaluate(wave, model, q));
  }
  return sum * hstep / 3.0;
}

namespace {

struct SnapshotCheck {
  double excess = -kInf;  // largest violation (positive means violated)
  double q = 0.0;
  bool upper = false;
};

SnapshotCheck check_snapshot(const MarkerField& state, const ErosionModel& model, const Envelope& lower,
                             const Envelope& upper, double tol, std::size_t n) {
  const QProfile p = reconstruct(state, model);
  const double D = state.total_drop;
  SnapshotCheck out;
  for (std::size_t i = 1; i < n; ++i) {
    const double q = -D + D * static_cast<double>(i) / static_cast<double>(n - 1);
    const double z = p.eval(q);
    const double up = z - upper(q) - tol;
    const double lo = lower(q) - tol - z;
    if (up > out.excess) out = {up, q, true};
    if (lo > out.excess) out = {lo, q, false};
  }
  return out;
}

}  // namespace

SandwichReport sandwich_check(const RunResult& run, const ErosionModel& model, const Envelope& lower,
                              const Envelope& upper, double T, double tol, std::size_t n) {
  SandwichReport rep;
  rep.worst_excess = -kInf;
  double onset = kInf;
  for (const Snapshot& snap : run.snapshots) {
    const SnapshotCheck c = check_snapshot(snap.state, model, lower, upper, tol, n);
    const bool ok = c.excess <= 0.0;
    if (!ok) {
      onset = kInf;
    } else if (!std::isfinite(onset)) {
      onset = snap.time;
    }
    if (snap.time < T) continue;
    ++rep.checked;
    rep.worst_excess = std::max(rep.worst_excess, c.excess);
    if (!ok && rep.holds) {
      rep.holds = false;
      rep.first_violation_time = snap.time;
      rep.first_violation_q = c.q;
      rep.first_violation_excess = c.excess;
      rep.first_violation_upper = c.upper;
    }
  }
  if (std::isfinite(onset)) rep.empirical_onset = onset;
  return rep;
}

SpeedEstimate level_speed(const RunResult& run, const ErosionModel& model, double level) {
  SpeedEstimate est;
  if (run.snapshots.size() < 2) return est;
  const Snapshot& a = run.snapshots[run.snapshots.size() - 2];
  const Snapshot& b = run.snapshots.back();
  if (!(b.time > a.time)) return est;
  est.t0 = a.time;
  est.t1 = b.time;
  est.u0 = level_crossing(anchored_profile(a.state, model), level);
  est.u1 = level_crossing(anchored_profile(b.state, model), level);
  est.speed = (est.u1 - est.u0) / (est.t1 - est.t0);
  return est;
}

ConvergenceResult convergence_experiment(const ErosionModel& model, const Sampler& zeta0, double D,
                                         const SolverConfig& schedule) {
  ConvergenceResult out;
  out.wave = construct(model, D);
  const MarkerField state = init_state(zeta0, D, schedule);
  out.run = run(state, model, schedule, &out.wave);
  if (!out.run.series.empty()) {
    for (const SeriesPoint& p : out.run.series) out.l1_series.emplace_back(p.t, p.l1_distance);
  } else {
    for (const Snapshot& s : out.run.snapshots) out.l1_series.emplace_back(s.time, l1_distance(s.state, out.wave, model));
  }
  out.final_l1 = l1_distance(out.run.final_state, out.wave, model);
  out.speed = level_speed(out.run, model, schedule.level);
  out.theorem_constant = 2.0 * envelope_constant(model);
  return out;
}

std::vector<double> windowed_maxima(const std::vector<std::pair<double, double>>& series, double width) {
  std::vector<double> out;
  if (series.empty() || !(width > 0.0)) return out;
  const double t0 = series.front().first;
  long current = -1;
  for (const auto& [t, v] : series) {
    const long k = static_cast<long>(std::floor((t - t0) / width + 1e-9));
    if (k != current) {
      out.push_back(v);
      current = k;
    } else {
      out.back() = std::max(out.back(), v);
    }
  }
  return out;
}

bool windowed_max_nonincreasing(const std::vector<std::pair<double, double>>& series, double width, double slack) {
  const std::vector<double> m = windowed_maxima(series, width);
  for (std::size_t k = 2; k < m.size(); ++k) {
    if (m[k] > m[k - 1] + slack) return false;
  }
  return true;
}

}  // namespace erodewave
