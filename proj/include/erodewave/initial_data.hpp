#pragma once

#include <limits>
#include <vector>

#include "erodewave/transforms.hpp"

namespace erodewave {

/// One piece of z(u) on [lower, upper): either a constant or base + amp * exp(rate * (u + offset)).
struct InitialPiece {
  enum class Kind { constant, exponential };
  Kind kind = Kind::constant;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double value = 0.0;  // constant pieces
  double base = 1.0;
  double amp = 0.0;
  double rate = 0.0;
  double offset = 0.0;

  double z(double u) const;
  /// Exact integral of (1 - z) over [a, b] within the piece.
  double drop(double a, double b) const;

  bool operator==(const InitialPiece&) const = default;
};

/**
 * Initial inverse slope z0(u), equal to 1 left of the first piece. Pieces are
 * contiguous and sorted; the last one may extend to +inf provided it tends to 1.
 */
class InitialData {
 public:
  explicit InitialData(std::vector<InitialPiece> pieces);

  const std::vector<InitialPiece>& pieces() const { return pieces_; }
  double z(double u) const;
  double total_drop() const { return total_drop_; }
  /// q(u) = -integral_u^inf (1 - z) dv.
  double q_of_u(double u) const;
  /// zeta(q) = z(u(q)); at a shock the left-most u is used.
  double zeta(double q) const;
  /// Drop-weighted mean of x = u - q.
  double mean_x() const;
  /// Piecewise-linear sample of z on [u_lo, u_hi].
  ZProfile sample(double u_lo, double u_hi, std::size_t n) const;

 private:
  double u_of_q(double q) const;

  std::vector<InitialPiece> pieces_;
  double total_drop_ = 0.0;
};

/// The corrected numerical-example data: z = 0 on (0, 0.6], 1 - exp(-(u + 0.11)/2) beyond.
InitialData experiment_initial_data();

}  // namespace erodewave
