#pragma once

#include <optional>
#include <string>
#include <vector>

namespace erodewave {

/// Symbolic description of an erosion function: a builtin name or the
/// coefficients of g(z) in ascending powers of z.
struct ModelSpec {
  std::optional<std::string> builtin;
  std::vector<double> g_poly;

  static ModelSpec from_builtin(std::string name) { return {std::move(name), {}}; }
  static ModelSpec from_poly(std::vector<double> coeffs) { return {std::nullopt, std::move(coeffs)}; }

  bool operator==(const ModelSpec&) const = default;
};

/// Dense polynomial with coefficients in ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  double operator()(double x) const;
  Polynomial derivative() const;
  const std::vector<double>& coefficients() const { return c_; }

  /// Quotient q and remainder r of p(x) = (1 - x) q(x) + r.
  std::pair<Polynomial, double> divide_one_minus_x() const;

 private:
  std::vector<double> c_;
};

/**
 * Erosion function in all three coordinate systems.
 *
 *   f(w) = w g(1/w)        slope coordinate, w >= 1
 *   g(z)                   inverse slope, z in [0,1]
 *   h(z) = g(z) / (1 - z)  drop coordinate, h(1) = -g'(1)
 *
 * h is held as the exact polynomial quotient of g by (1 - z), so h and its
 * derivatives carry no cancellation near z = 1. Immutable after construction.
 */
class ErosionModel {
 public:
  explicit ErosionModel(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }

  double g(double z) const;
  double g_prime(double z) const;
  double g_second(double z) const;
  double h(double z) const;
  double h_prime(double z) const;
  double h_second(double z) const;

  /// h(0) = g(0) = f'(+inf).
  double h0() const { return h0_; }
  /// h(1) = -g'(1) = f'(1).
  double h1() const { return h1_; }
  /// h'(1) = -g''(1)/2.
  double hprime1() const { return hprime1_; }
  /// Remainder g(1) of the deflation; zero up to rounding for admissible models.
  double g_at_one() const { return g_at_one_; }

  /// Inverse of h on [h(0), h(1)].
  double h_inverse(double y) const;

  double f(double w) const;
  double f_prime(double w) const;
  double f_prime_infinity() const { return h0_; }

 private:
  ModelSpec spec_;
  Polynomial g_, dg_, d2g_;
  Polynomial h_, dh_, d2h_;
  double h0_ = 0.0;
  double h1_ = 0.0;
  double hprime1_ = 0.0;
  double g_at_one_ = 0.0;
};

/// Builds a model from a builtin name ("quadratic", "example5") or polynomial g.
ErosionModel make_model(const ModelSpec& spec);

enum class Quantity { g, g_prime, h, h_prime };

/// Checked evaluation; z must lie in [0,1].
double eval(const ErosionModel& model, Quantity which, double z);
double h_inverse(const ErosionModel& model, double y);
double f_eval(const ErosionModel& model, double w);

struct HypothesisCheck {
  std::string name;
  bool passed = true;
  double worst_z = 0.0;      // grid point with the smallest margin
  double worst_margin = 0.0; // margin there (>= 0 passes, except strict checks need > 0)
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;
  bool all_passed() const;
};

/// Checks g(1)=0, g(0)>=0, g''<0, h>=0, h'>0 and h'' < 2h'/(1-z) on a 1001-point grid.
ValidationReport validate(const ErosionModel& model);

}  // namespace erodewave
