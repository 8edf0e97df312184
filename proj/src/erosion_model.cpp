#include "erodewave/erosion_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erodewave/error.hpp"
#include "erodewave/numerics.hpp"

namespace erodewave {

namespace {

constexpr double kLimitWindow = 1e-7;
constexpr std::size_t kValidationGrid = 1001;

void check_unit(double z, const char* what) {
  if (!(z >= 0.0 && z <= 1.0))
    throw DomainError(std::string(what) + ": z=" + std::to_string(z) + " outside [0,1]");
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  if (c_.empty()) c_.push_back(0.0);
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

std::pair<Polynomial, double> Polynomial::divide_one_minus_x() const {
  // Synthetic division by (x - 1), then negate the quotient.
  const std::size_t n = c_.size() - 1;
  if (n == 0) return {Polynomial({0.0}), c_[0]};
  std::vector<double> q(n);
  q[n - 1] = c_[n];
  for (std::size_t k = n - 1; k >= 1; --k) q[k - 1] = c_[k] + q[k];
  const double rem = c_[0] + q[0];
  for (double& v : q) v = -v;
  return {Polynomial(std::move(q)), rem};
}

ErosionModel::ErosionModel(ModelSpec spec) : spec_(std::move(spec)) {
  std::vector<double> coeffs;
  if (spec_.builtin) {
    if (*spec_.builtin == "quadratic") {
      coeffs = {1.0, 0.0, -1.0};
    } else if (*spec_.builtin == "example5") {
      coeffs = {0.5, 0.5, -1.0};  // (1 - z)(1/2 + z)
    } else {
      throw ModelError("unknown builtin erosion model '" + *spec_.builtin + "'");
    }
  } else {
    coeffs = spec_.g_poly;
    if (coeffs.empty()) throw ModelError("empty g polynomial coefficient list");
    if (coeffs.size() < 2) throw ModelError("g polynomial needs at least 2 coefficients");
    for (double c : coeffs)
      if (!std::isfinite(c)) throw ModelError("non-finite g polynomial coefficient");
  }
  g_ = Polynomial(coeffs);
  dg_ = g_.derivative();
  d2g_ = dg_.derivative();
  auto [quot, rem] = g_.divide_one_minus_x();
  h_ = quot;
  dh_ = h_.derivative();
  d2h_ = dh_.derivative();
  g_at_one_ = rem;
  h0_ = g_(0.0);
  h1_ = -dg_(1.0);
  hprime1_ = -0.5 * d2g_(1.0);
}

double ErosionModel::g(double z) const { return g_(z); }
double ErosionModel::g_prime(double z) const { return dg_(z); }
double ErosionModel::g_second(double z) const { return d2g_(z); }

double ErosionModel::h(double z) const {
  if (std::abs(1.0 - z) < kLimitWindow) return h1_;
  return h_(z);
}

double ErosionModel::h_prime(double z) const {
  if (std::abs(1.0 - z) < kLimitWindow) return hprime1_;
  return dh_(z);
}

double ErosionModel::h_second(double z) const { return d2h_(z); }

double ErosionModel::h_inverse(double y) const {
  const double span = std::max(1.0, std::abs(h1_));
  if (y < h0_ - 1e-12 * span || y > h1_ + 1e-12 * span)
    throw DomainError("h_inverse: y=" + std::to_string(y) + " outside [h(0), h(1)]");
  if (y <= h0_) return 0.0;
  if (y >= h1_) return 1.0;
  return numerics::solve_increasing([this](double z) { return h_(z); }, y, 0.0, 1.0,
                                    [this](double z) { return dh_(z); });
}

double ErosionModel::f(double w) const { return w * g_(1.0 / w); }

double ErosionModel::f_prime(double w) const {
  const double z = 1.0 / w;
  return g_(z) - z * dg_(z);
}

ErosionModel make_model(const ModelSpec& spec) { return ErosionModel(spec); }

double eval(const ErosionModel& model, Quantity which, double z) {
  check_unit(z, "eval");
  switch (which) {
    case Quantity::g: return model.g(z);
    case Quantity::g_prime: return model.g_prime(z);
    case Quantity::h: return model.h(z);
    case Quantity::h_prime: return model.h_prime(z);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double h_inverse(const ErosionModel& model, double y) { return model.h_inverse(y); }

double f_eval(const ErosionModel& model, double w) {
  if (!(w >= 1.0)) throw DomainError("f_eval: w=" + std::to_string(w) + " < 1");
  return model.f(w);
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ValidationReport validate(const ErosionModel& m) {
  ValidationReport report;
  auto scan = [&](std::string name, auto margin, bool strict, double z_max = 1.0) {
    HypothesisCheck c;
    c.name = std::move(name);
    c.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kValidationGrid; ++i) {
      const double z = static_cast<double>(i) / static_cast<double>(kValidationGrid - 1);
      if (z > z_max) break;
      const double v = margin(z);
      if (v < c.worst_margin) {
        c.worst_margin = v;
        c.worst_z = z;
      }
    }
    c.passed = strict ? c.worst_margin > 0.0 : c.worst_margin >= 0.0;
    report.checks.push_back(c);
  };

  {
    HypothesisCheck c{"g(1)=0", std::abs(m.g_at_one()) <= 1e-12, 1.0, -std::abs(m.g_at_one())};
    report.checks.push_back(c);
  }
  {
    HypothesisCheck c{"g(0)>=0", m.g(0.0) >= 0.0, 0.0, m.g(0.0)};
    report.checks.push_back(c);
  }
  scan("g''<0", [&](double z) { return -m.g_second(z); }, true);
  scan("h>=0", [&](double z) { return m.h(z); }, false);
  scan("h'>0", [&](double z) { return m.h_prime(z); }, true);
  scan("h''<2h'/(1-z)",
       [&](double z) { return 2.0 * m.h_prime(z) / (1.0 - z) - m.h_second(z); }, true,
       1.0 - 1e-3);
  return report;
}

}  // namespace erodewave
