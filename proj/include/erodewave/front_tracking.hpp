#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "erodewave/erosion_model.hpp"
#include "erodewave/traveling_wave.hpp"
#include "erodewave/transforms.hpp"

namespace erodewave {

struct Marker {
  double q = 0.0;
  double zeta = 0.0;
};

/**
 * Solver state on the fixed drop interval [-D, 0].
 *
 * Markers are characteristic points (q_i, zeta_i) with strictly increasing q and
 * non-decreasing zeta. An optional shock occupies [-D, shock_right] with zeta = 0.
 * Implicit boundary states: zeta = 1 just left of -D and at q = 0.
 *
 * `anchor_x` is the drop-weighted mean of the physical position x over the
 * profile; it fixes the otherwise free translation when mapping back to u.
 */
struct MarkerField {
  double total_drop = 0.0;
  std::vector<Marker> markers;
  std::optional<double> shock_right;
  double time = 0.0;
  double anchor_x = 0.0;
};

struct SolverConfig {
  double delta_q = 1e-3;
  double cfl = 0.4;
  double clamp_eps = 1e-10;
  double boundary_gap = 0.0;  // 0 means delta_q
  double dt_max = 1e-2;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  double series_interval = 0.0;  // 0 disables the L1 series
  bool refine_interior = true;
  std::size_t max_steps = 50'000'000;
  double level = 0.5;  // z level tracked for the u-frame speed estimate
};

enum class EventKind { absorbed, clamped, emitted, shock_created, shock_removed, seeded, refined, merged };

const char* to_string(EventKind k);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::absorbed;
  double q = 0.0;
  double zeta = 0.0;
};

struct Snapshot {
  double time = 0.0;
  MarkerField state;
};

struct SeriesPoint {
  double t = 0.0;
  double l1_distance = 0.0;
  double shock_front = 0.0;     // NaN without a shock
  double speed_estimate = 0.0;  // NaN at the first point
  double level_position = 0.0;  // anchored u where z first reaches the tracked level
  double total_variation = 0.0;
};

struct StepStats {
  std::size_t steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  std::size_t max_markers = 0;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  std::vector<Event> events;
  std::vector<SeriesPoint> series;
  StepStats stats;
  MarkerField final_state;
};

using Sampler = std::function<double(double)>;

/// Resolves the default boundary gap and checks delta_q > 0, 0 < cfl <= 1.
SolverConfig normalized(SolverConfig config);

MarkerField init_state(const Sampler& zeta0, double D, const SolverConfig& config);

/// Piecewise-linear reconstruction including the shock and boundary nodes.
QProfile reconstruct(const MarkerField& state, const ErosionModel& model);

/// Left state of the shock's right front, extrapolated along the first marker's characteristic.
double front_state(const MarkerField& state, const ErosionModel& model);

double integral_F(const MarkerField& state, const ErosionModel& model, double q);

struct MarkerVelocity {
  double qdot = 0.0;
  double zetadot = 0.0;
};

MarkerVelocity marker_velocity(const MarkerField& state, const ErosionModel& model, std::size_t i);

/// Characteristic speeds for a given zeta and integral factor F.
MarkerVelocity characteristic_velocity(const ErosionModel& model, double zeta, double F);

/// Right-front speed of the shock; 0 with a diagnostic when z+ = 0.
double shock_right_speed(const MarkerField& state, const ErosionModel& model,
                         std::string* diagnostic = nullptr);

/// Right-front speed for explicit data.
double shock_right_speed(const ErosionModel& model, double F, double z_plus, double delta);

/// Speeds of a kink (z- > z+ > 0) and of a hyper-kink (z+ = 0).
double kink_speed(const ErosionModel& model, double F, double z_minus, double z_plus);
double hyperkink_speed(const ErosionModel& model, double F, double z_minus);

struct StepOutcome {
  MarkerField state;
  std::vector<Event> events;
  double dt = 0.0;
};

/// One Heun step. `dt_cap` bounds the step (used to land on output times).
StepOutcome step(const MarkerField& state, const ErosionModel& model, const SolverConfig& config,
                 double dt_cap = 0.0);

/// Integrates to config.t_end. The L1 series is recorded when `reference` is given.
RunResult run(const MarkerField& state, const ErosionModel& model, const SolverConfig& config,
              const StationaryWave* reference = nullptr);

double l1_distance(const MarkerField& state, const StationaryWave& wave, const ErosionModel& model);
double l1_distance(const QProfile& a, const QProfile& b);

double total_variation(const MarkerField& state, const ErosionModel& model);

/// z(u) of the state, translated so that the mean physical position equals anchor_x.
ZProfile anchored_profile(const MarkerField& state, const ErosionModel& model);

/// Lemma-style shift of a marker: q - phi^-1(zeta), constant along exact characteristics.
double characteristic_shift(const ErosionModel& model, double q, double zeta);

}  // namespace erodewave
