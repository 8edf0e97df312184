#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "erodewave/erosion_model.hpp"
#include "erodewave/transforms.hpp"

namespace erodewave {

enum class WaveType { Type1 = 1, Type2 = 2, Type3 = 3, Type4 = 4 };

/// Relative position of phi(q) and z_stat(q + D) on [-D, 0], cases 1..5.
struct Classification {
  int regime_case = 0;
  std::optional<double> q_plus;
};

struct StationaryWave {
  double total_drop = 0.0;
  WaveType wave_type = WaveType::Type1;
  int regime_case = 1;
  std::optional<double> shock_right;  // Types 3 and 4
  double smooth_left = 0.0;           // Z = phi on (smooth_left, 0]
};

struct PhysicalWave {
  double speed = 0.0;
  std::vector<std::pair<double, double>> xi_samples;  // (xi, W), ascending xi
  HeightCurve height_curve;
  double phase_offset = 0.0;       // drop assigned to the truncated right tail
  double cross_check_error = 0.0;  // sup deviation from the transform of Z
  std::string diagnostic;
};

inline constexpr double kTypeTwoTolerance = 1e-10;

/// `bracket_jitter` in [0, 1) shrinks the root bracket asymmetrically; the root is unaffected.
Classification classify(const ErosionModel& model, double D, double bracket_jitter = 0.0);

StationaryWave construct(const ErosionModel& model, double D);

/// Z(q) with Z(-D) = 1.
double evaluate(const StationaryWave& wave, const ErosionModel& model, double q);

/// Samples Z on `n` uniform points of (-D, 0] with the stationary jump nodes inserted.
QProfile sample_profile(const StationaryWave& wave, const ErosionModel& model, std::size_t n);

double physical_speed(const ErosionModel& model, const StationaryWave& wave);

/// Slope profile from the moving-frame ODE, integrated leftward from xi = window.
PhysicalWave physical_wave(const ErosionModel& model, const StationaryWave& wave,
                           double window = 10.0, std::size_t n = 2000);

const char* to_string(WaveType t);

}  // namespace erodewave
