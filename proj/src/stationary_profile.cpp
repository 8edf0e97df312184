#include "erodewave/stationary_profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "erodewave/error.hpp"
#include "erodewave/numerics.hpp"

namespace erodewave {

namespace {

constexpr double kPsiSeriesCut = 1e-8;
constexpr double kDssLo = 1e-6;
constexpr double kDssHi = 100.0;
constexpr std::size_t kConstantGrid = 10001;

double drop_tolerance(double d) { return 1e-10 * std::max(1.0, std::abs(d)); }

void check_delta(const ErosionModel& model, double delta, const char* what) {
  const double dss = d_ss(model);
  if (!(delta >= 0.0) || (std::isfinite(dss) && delta > dss + drop_tolerance(dss)))
    throw DomainError(std::string(what) + ": delta=" + std::to_string(delta) +
                      " outside [0, d_ss]");
}

}  // namespace

double phi(const ErosionModel& model, double q) {
  if (q > 0.0) throw DomainError("phi: q=" + std::to_string(q) + " > 0");
  return phi_extended(model, q);
}

double phi_extended(const ErosionModel& m, double q) {
  if (q >= 0.0) return 1.0;
  const double dhk = d_hk(m);
  if (q <= -dhk) return 0.0;
  const double y = m.h1() / (1.0 - m.h1() * q);
  if (y <= m.h0()) return 0.0;
  return m.h_inverse(y);
}

double phi_inverse(const ErosionModel& m, double zeta) {
  if (!(zeta > 0.0 || m.h0() > 0.0) || zeta < 0.0 || zeta > 1.0)
    throw DomainError("phi_inverse: zeta=" + std::to_string(zeta) + " outside domain");
  return 1.0 / m.h1() - 1.0 / m.h(zeta);
}

double phi_prime(const ErosionModel& m, double q) {
  if (q > 0.0) throw DomainError("phi_prime: q > 0");
  if (q <= -d_hk(m)) return 0.0;
  const double z = phi_extended(m, q);
  const double hz = m.h(z);
  return hz * hz / m.h_prime(z);
}

double d_hk(const ErosionModel& m) {
  if (m.h0() <= 0.0) return kInfiniteDrop;
  return 1.0 / m.h0() - 1.0 / m.h1();
}

double psi(const ErosionModel& m, double s) {
  if (!(s >= 0.0)) throw DomainError("psi: s=" + std::to_string(s) + " < 0");
  const double a = m.h0();
  if (s <= kPsiSeriesCut) return a + 0.5 * a * a * s;
  return std::expm1(a * s) / s;
}

double d_ss(const ErosionModel& m) {
  if (m.h0() <= 0.0) return kInfiniteDrop;
  numerics::RootOptions opts;
  opts.residual_tol = 1e-14;
  opts.x_tol = 1e-14;
  return numerics::solve_increasing([&](double s) { return psi(m, s); }, m.h1(), kDssLo, kDssHi,
                                    {}, opts);
}

double z_stat(const ErosionModel& m, double delta) {
  check_delta(m, delta, "z_stat");
  if (m.h0() <= 0.0) return 0.0;
  const double target = psi(m, delta);
  if (target <= m.h0()) return 0.0;
  if (target >= m.h1()) return 1.0;
  return m.h_inverse(target);
}

double z_adm(const ErosionModel& m, double delta) {
  check_delta(m, delta, "z_adm");
  const double target = psi(m, delta);
  auto lhs = [&](double z) { return m.h(z) - z * (1.0 - z) * m.h_prime(z); };
  if (target <= lhs(0.0)) return 0.0;
  if (target >= lhs(1.0)) return 1.0;
  return numerics::solve_increasing(lhs, target, 0.0, 1.0);
}

double kappa(const ErosionModel& m, double c_o) {
  auto hp = [&](double z) { return m.h_prime(z); };
  if (m.h0() > 0.0) {
    const double max_hp = numerics::grid_max(hp, 0.0, 1.0, kConstantGrid).value;
    return m.h0() * m.h0() / (2.0 * max_hp);
  }
  auto ratio = [&](double z) { return m.h(z) * m.h(z) / m.h_prime(z); };
  return numerics::grid_min(ratio, c_o, 1.0, kConstantGrid).value;
}

ProfileConstants profile_constants(const ErosionModel& m, double c_o) {
  ProfileConstants c;
  c.d_hk = d_hk(m);
  c.d_ss = d_ss(m);
  c.kappa = kappa(m, c_o);
  c.max_h_prime =
      numerics::grid_max([&](double z) { return m.h_prime(z); }, 0.0, 1.0, kConstantGrid).value;
  c.max_h2_over_hp = numerics::grid_max([&](double z) { return m.h(z) * m.h(z) / m.h_prime(z); },
                                        0.0, 1.0, kConstantGrid)
                         .value;
  if (m.h0() > 0.0) {
    c.c_phi_min = m.h0() * m.h0() / c.max_h_prime;
  } else {
    c.c_phi_min = numerics::grid_min([&](double z) { return m.h(z) * m.h(z) / m.h_prime(z); },
                                     c_o, 1.0, kConstantGrid)
                      .value;
  }
  return c;
}

}  // namespace erodewave
