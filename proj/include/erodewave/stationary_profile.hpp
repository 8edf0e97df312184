#pragma once

#include <limits>

#include "erodewave/erosion_model.hpp"

namespace erodewave {

inline constexpr double kInfiniteDrop = std::numeric_limits<double>::infinity();

struct ProfileConstants {
  double d_hk = 0.0;       // +inf when h(0) = 0
  double d_ss = 0.0;       // +inf when h(0) = 0
  double kappa = 0.0;
  double c_phi_min = 0.0;
  double max_h_prime = 0.0;
  double max_h2_over_hp = 0.0;  // max of h^2/h' = max phi'
};

/// Smooth stationary profile: phi(q) = h^-1(h1 / (1 - h1 q)) on [-D_hk, 0], zero to the left.
double phi(const ErosionModel& model, double q);
/// Inverse of phi on (0, 1]: q = 1/h1 - 1/h(zeta).
double phi_inverse(const ErosionModel& model, double zeta);
/// phi'(q) = h(phi)^2 / h'(phi); zero left of -D_hk.
double phi_prime(const ErosionModel& model, double q);

/// phi extended to all of R: 1 for q >= 0. Used for shift interpolation.
double phi_extended(const ErosionModel& model, double q);

double d_hk(const ErosionModel& model);
double psi(const ErosionModel& model, double s);
double d_ss(const ErosionModel& model);
double z_stat(const ErosionModel& model, double delta);
double z_adm(const ErosionModel& model, double delta);

/// Transversality gap. For h(0) = 0 the minimum of h^2/h' is taken over [c_o, 1].
double kappa(const ErosionModel& model, double c_o = 1e-2);

ProfileConstants profile_constants(const ErosionModel& model, double c_o = 1e-2);

}  // namespace erodewave
