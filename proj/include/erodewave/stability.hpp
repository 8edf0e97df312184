#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "erodewave/erosion_model.hpp"
#include "erodewave/front_tracking.hpp"
#include "erodewave/traveling_wave.hpp"

namespace erodewave {

enum class EnvelopeKind { upper_stage1, upper_stage2, lower_stage1, lower_stage2 };

const char* to_string(EnvelopeKind k);

/// Upper or lower comparison curve for zeta(t, q) on [-D, 0], valid for t >= validity_time.
struct Envelope {
  EnvelopeKind kind = EnvelopeKind::upper_stage1;
  double total_drop = 0.0;
  double eps = 0.0;
  std::function<double(double)> curve;  // value 1 at q = -D

  // q-hat for the stage-2 curves, q1 for the lower stage-1 curve, -eps for the upper one.
  double switch_point = 0.0;
  double validity_time = 0.0;

  double zeta_o = 0.0;        // data value that fixes the stage-1 time
  double stage1_time = 0.0;   // T1 (upper) or script-T1 (lower)
  double ode_time = 0.0;      // stage-2 time from the front ODE
  double bound_time = 0.0;    // stage-2 closed-form bound (may be +inf)
  double merge_time = std::numeric_limits<double>::quiet_NaN();  // ODE front reaching -D
  double v_eps = 0.0;
  double constant = 0.0;      // C1 or C2
  double q_plus = 0.0;        // stationary shock front (-D without a shock)
  double front_start = 0.0;   // initial value of the comparison front
  bool uses_phi = false;      // upper stage 1 collapsed to phi itself
  std::string note;

  double operator()(double q) const { return curve(q); }
};

/// Upper stage-1 curve; zeta0 is the initial datum in the q frame.
Envelope upper_envelope(const ErosionModel& model, double D, double eps, const Sampler& zeta0);

/// Upper stage-2 curve for D > D_hk. When initial_front lies right of -D_hk - eps the
/// comparison front starts there instead.
Envelope upper_stage2(const ErosionModel& model, double D, double eps, const Envelope& stage1,
                      std::optional<double> initial_front = std::nullopt);

/// Lower stage-1 curve for D < D_ss.
Envelope lower_envelope(const ErosionModel& model, double D, double eps, const Sampler& zeta0);

/// Lower stage-2 curve for D < D_ss with q1 > -D.
Envelope lower_stage2(const ErosionModel& model, double D, double eps, const Envelope& stage1);

/// 2 max(h^2/h') / kappa, shared by both stage-2 constructions.
double envelope_constant(const ErosionModel& model);

/// L1 distance between an envelope and the stationary profile, by Simpson on a fine grid.
double envelope_l1(const Envelope& env, const StationaryWave& wave, const ErosionModel& model,
                   std::size_t n = 20001);

struct SandwichReport {
  bool holds = true;
  std::size_t checked = 0;
  double first_violation_time = std::numeric_limits<double>::quiet_NaN();
  double first_violation_q = std::numeric_limits<double>::quiet_NaN();
  double first_violation_excess = 0.0;
  bool first_violation_upper = false;
  double worst_excess = 0.0;
  // Earliest snapshot time from which every later snapshot satisfies the sandwich.
  double empirical_onset = std::numeric_limits<double>::quiet_NaN();
};

/// Pointwise check Z- - tol <= zeta <= Z+ + tol on an n-point grid for snapshots with t >= T.
SandwichReport sandwich_check(const RunResult& run, const ErosionModel& model, const Envelope& lower,
                              const Envelope& upper, double T, double tol, std::size_t n = 2001);

struct SpeedEstimate {
  double speed = std::numeric_limits<double>::quiet_NaN();
  double t0 = 0.0;
  double t1 = 0.0;
  double u0 = 0.0;
  double u1 = 0.0;
};

struct ConvergenceResult {
  StationaryWave wave;
  RunResult run;
  std::vector<std::pair<double, double>> l1_series;  // (t, L1 distance)
  SpeedEstimate speed;
  double final_l1 = 0.0;
  double theorem_constant = 0.0;  // C1 + C2
};

/// Runs the solver from zeta0 and reports the L1 series and a late-time u-frame speed.
ConvergenceResult convergence_experiment(const ErosionModel& model, const Sampler& zeta0, double D,
                                         const SolverConfig& schedule);

/// Tracks a fixed z level on the anchored u profile between the last two snapshots.
SpeedEstimate level_speed(const RunResult& run, const ErosionModel& model, double level = 0.5);

/// Maxima over consecutive windows of the given width, starting at the first sample.
std::vector<double> windowed_maxima(const std::vector<std::pair<double, double>>& series, double width);

/// True when the windowed maxima never increase by more than slack after the first window.
bool windowed_max_nonincreasing(const std::vector<std::pair<double, double>>& series, double width,
                                double slack = 0.0);

}  // namespace erodewave
