#include "doctest.h"

#include <cmath>
#include <utility>
#include <vector>

#include "erodewave/error.hpp"
#include "erodewave/stability.hpp"
#include "erodewave/stationary_profile.hpp"

using namespace erodewave;

namespace {

ErosionModel quad() { return make_model(ModelSpec::from_builtin("quadratic")); }

// Closed forms for g = 1 - z^2, h = 1 + z.
double phi_q(double q) { return q <= -0.5 ? 0.0 : std::min(1.0, (1.0 + 2.0 * q) / (1.0 - 2.0 * q)); }
double psi_q(double s) { return std::expm1(s) / s; }
double z_stat_q(double s) { return psi_q(s) - 1.0; }
double z_adm_q(double s) { return std::sqrt(psi_q(s) - 1.0); }

constexpr double kQPlusD1 = -0.125782534201282920938;

Sampler wave_sampler(const StationaryWave& w, const ErosionModel& m) {
  return [&w, &m](double q) {
    if (q <= -w.total_drop) return w.shock_right ? 0.0 : phi(m, -w.total_drop);
    return evaluate(w, m, q);
  };
}

}  // namespace

TEST_CASE("upper stage 1 curve") {
  auto m = quad();
  // Data sitting above phi near q = 0 forces the plateau form.
  Sampler above = [](double q) { return phi_q(q + 0.03); };
  auto env = upper_envelope(m, 0.3, 0.05, above);
  CHECK_FALSE(env.uses_phi);
  CHECK(env(-0.1) == doctest::Approx(0.9 / 1.1).epsilon(1e-12));
  CHECK(env(-0.01) == 1.0);
  CHECK(env(-0.3) == 1.0);
  const double zo = phi_q(-0.02);
  CHECK(env.validity_time == doctest::Approx(0.3 / (1.0 - zo)).epsilon(1e-9));

  auto w = construct(m, 0.3);
  auto on_wave = upper_envelope(m, 0.3, 0.05, wave_sampler(w, m));
  CHECK(on_wave.uses_phi);
  for (double q : {-0.29, -0.2, -0.1, -0.01, 0.0}) CHECK(on_wave(q) == doctest::Approx(phi_q(q)).epsilon(1e-12));

  CHECK_THROWS_AS(upper_envelope(m, 0.3, 0.3, above), ModelError);
}

TEST_CASE("stage 2 constants") {
  auto m = quad();
  CHECK(envelope_constant(m) == doctest::Approx(16.0).epsilon(1e-9));
  auto e5 = make_model(ModelSpec::from_builtin("example5"));
  CHECK(envelope_constant(e5) == doctest::Approx(36.0).epsilon(1e-9));
}

TEST_CASE("upper stage 2") {
  auto m = quad();
  auto w = construct(m, 1.0);
  auto s1 = upper_envelope(m, 1.0, 0.01, wave_sampler(w, m));
  auto s2 = upper_stage2(m, 1.0, 0.01, s1);
  CHECK(s2.switch_point == doctest::Approx(kQPlusD1 - 0.16).epsilon(1e-9));
  CHECK(s2.front_start == doctest::Approx(-0.51));

  // Dense closed-form minimisation of z_stat(q + D) - phi(q) between the front start and q-hat.
  double v = 1e9;
  const double a = -0.51, b = kQPlusD1 - 0.16;
  for (int i = 0; i <= 200000; ++i) {
    const double q = a + (b - a) * i / 200000.0;
    v = std::min(v, z_stat_q(q + 1.0) - phi_q(q));
  }
  CHECK(s2.v_eps == doctest::Approx(v).epsilon(1e-6));
  CHECK(s2.v_eps > 0.0);
  CHECK(s2.bound_time == doctest::Approx(0.51 / ((1.0 - phi_q(kQPlusD1)) * 1.0 * v)).epsilon(1e-5));
  CHECK(s2.validity_time >= s1.validity_time + s2.ode_time);

  auto s2b = upper_stage2(m, 1.0, 0.05, upper_envelope(m, 1.0, 0.05, wave_sampler(w, m)));
  CHECK(s2b.v_eps > 0.0);

  CHECK_THROWS_AS(upper_stage2(m, 0.3, 0.01, upper_envelope(m, 0.3, 0.01, wave_sampler(w, m))), ModelError);
}

TEST_CASE("upper stage 2 starts at a front already past the default start") {
  auto m = quad();
  auto w = construct(m, 1.0);
  auto s1 = upper_envelope(m, 1.0, 0.002, wave_sampler(w, m));
  auto plain = upper_stage2(m, 1.0, 0.002, s1);
  auto shifted = upper_stage2(m, 1.0, 0.002, s1, -0.3);
  CHECK(shifted.front_start == -0.3);
  CHECK_FALSE(shifted.note.empty());
  CHECK(shifted.ode_time < plain.ode_time);
}

TEST_CASE("upper stage 2 front time matches a direct time integration") {
  auto m = quad();
  auto w = construct(m, 1.0);
  auto s2 = upper_stage2(m, 1.0, 0.002, upper_envelope(m, 1.0, 0.002, wave_sampler(w, m)), -0.45);
  const double target = s2.switch_point;
  REQUIRE(s2.uses_phi);
  // Stationary data lies below phi, so stage 1 is phi itself.
  auto speed = [](double q) {
    const double z = phi_q(q);
    return (1.0 - z) / z * (psi_q(q + 1.0) - (1.0 + z));
  };
  double q = -0.45, t = 0.0;
  const double dt = 1e-5;
  while (q < target) {
    const double k1 = speed(q), k2 = speed(q + 0.5 * dt * k1), k3 = speed(q + 0.5 * dt * k2), k4 = speed(q + dt * k3);
    const double qn = q + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    if (qn >= target) {
      t += dt * (target - q) / (qn - q);
      break;
    }
    q = qn;
    t += dt;
  }
  CHECK(s2.ode_time == doctest::Approx(t).epsilon(1e-4));
}

TEST_CASE("lower stage 1") {
  auto m = quad();
  auto w03 = construct(m, 0.3);
  auto e = lower_envelope(m, 0.3, 0.01, wave_sampler(w03, m));
  CHECK(e.switch_point == -0.3);
  for (int i = 1; i <= 2000; ++i) {
    const double q = -0.3 + 0.3 * i / 2000.0;
    CHECK(z_adm_q(q + 0.3) < phi_q(q - 0.01));
  }

  auto w1 = construct(m, 1.0);
  auto e1 = lower_envelope(m, 1.0, 0.01, wave_sampler(w1, m));
  double lo = -0.5, hi = 0.0;
  auto diff = [](double q) { return phi_q(q - 0.01) - z_adm_q(q + 1.0); };
  // diff < 0 at -0.5 and > 0 at 0; the root is unique on this bracket.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (diff(mid) < 0.0 ? lo : hi) = mid;
  }
  CHECK(e1.switch_point > -0.5);
  CHECK(e1.switch_point < 0.0);
  CHECK(e1.switch_point == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
  CHECK(e1(0.0) == doctest::Approx(phi_q(-0.01)));
  CHECK(e1(0.0) < 1.0);
  CHECK(e1(e1.switch_point - 1e-6) == 0.0);

  auto w2 = construct(m, 2.0);
  CHECK_THROWS_AS(lower_envelope(m, 2.0, 0.01, wave_sampler(w2, m)), ModelError);
}

TEST_CASE("lower stage 2") {
  auto m = quad();
  auto w1 = construct(m, 1.0);
  auto s1 = lower_envelope(m, 1.0, 0.002, wave_sampler(w1, m));
  auto s2 = lower_stage2(m, 1.0, 0.002, s1);
  CHECK(s2.constant == doctest::Approx(16.0).epsilon(1e-9));
  CHECK(s2.switch_point == doctest::Approx(kQPlusD1 + 0.032).epsilon(1e-9));
  CHECK(s2.validity_time >= s1.validity_time);

  // Type 1: with a wide shift the intersection appears and the comparison front runs into -D.
  auto w03 = construct(m, 0.3);
  auto t1 = lower_envelope(m, 0.3, 0.2, wave_sampler(w03, m));
  REQUIRE(t1.switch_point > -0.3);
  auto t2 = lower_stage2(m, 0.3, 0.2, t1);
  CHECK(std::isfinite(t2.merge_time));
  CHECK(t2.stage1_time + t2.merge_time <= t2.validity_time + 1e-12);
  CHECK(t2(-0.299) == doctest::Approx(phi_q(-0.499)));

  CHECK_THROWS_AS(lower_stage2(m, 0.3, 0.01, lower_envelope(m, 0.3, 0.01, wave_sampler(w03, m))), ModelError);
}

TEST_CASE("envelope ordering and L1 distance") {
  auto m = quad();
  auto w = construct(m, 1.0);
  auto z0 = wave_sampler(w, m);
  for (double eps : {0.002, 0.01, 0.05, 0.1}) {
    auto up = upper_stage2(m, 1.0, eps, upper_envelope(m, 1.0, eps, z0));
    auto l1 = lower_envelope(m, 1.0, eps, z0);
    auto lo = l1.switch_point > -1.0 ? lower_stage2(m, 1.0, eps, l1) : l1;
    for (int i = 1; i <= 2000; ++i) {
      const double q = -1.0 + i / 2000.0;
      const double z = evaluate(w, m, q);
      CHECK(up(q) >= z - 1e-12);
      CHECK(lo(q) <= z + 1e-12);
    }
    CHECK(envelope_l1(up, w, m) <= up.constant * eps);
    CHECK(envelope_l1(lo, w, m) <= envelope_constant(m) * eps);
  }
}

TEST_CASE("sandwich on the stationary solution and a negative control") {
  auto m = quad();
  const double D = 1.0, eps = 0.002;
  auto w = construct(m, D);
  auto z0 = wave_sampler(w, m);
  auto up = upper_stage2(m, D, eps, upper_envelope(m, D, eps, z0));
  auto lo = lower_stage2(m, D, eps, lower_envelope(m, D, eps, z0));

  SolverConfig c;
  c.delta_q = 1e-3 * D;
  c.t_end = 2.0;
  c.snapshot_times = {0.0, 0.5, 1.0, 1.5, 2.0};
  auto res = convergence_experiment(m, z0, D, c);
  auto rep = sandwich_check(res.run, m, lo, up, 0.0, 10 * c.delta_q);
  CHECK(rep.holds);
  CHECK(rep.checked == 5);
  CHECK(rep.empirical_onset == 0.0);

  Envelope shrunk = up;
  const double qh = up.switch_point + 0.5;
  auto base = up.curve;
  shrunk.curve = [base, D, qh](double q) { return q <= -D ? 1.0 : (q <= qh ? 0.0 : base(q)); };
  auto bad = sandwich_check(res.run, m, lo, shrunk, 0.0, 10 * c.delta_q);
  CHECK_FALSE(bad.holds);
  CHECK(bad.first_violation_upper);
  CHECK(bad.first_violation_time == 0.0);
  CHECK(std::isnan(bad.empirical_onset));

  for (const auto& [t, l1] : res.l1_series) CHECK(l1 <= 5 * c.delta_q);
  CHECK(res.theorem_constant == doctest::Approx(32.0));
}

TEST_CASE("windowed maxima") {
  std::vector<std::pair<double, double>> s = {{0.0, 1.0}, {0.5, 3.0}, {1.0, 2.0}, {1.5, 2.5}, {2.0, 1.0}, {2.9, 0.5}};
  auto m = windowed_maxima(s, 1.0);
  REQUIRE(m.size() == 3);
  CHECK(m[0] == 3.0);
  CHECK(m[1] == 2.5);
  CHECK(m[2] == 1.0);
  CHECK(windowed_max_nonincreasing(s, 1.0));
  s.push_back({3.1, 1.2});
  CHECK_FALSE(windowed_max_nonincreasing(s, 1.0));
  CHECK(windowed_max_nonincreasing(s, 1.0, 0.5));
}
