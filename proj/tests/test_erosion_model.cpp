#include "doctest.h"

#include <cmath>

#include "erodewave/erosion_model.hpp"
#include "erodewave/error.hpp"

using namespace erodewave;

namespace {

const HypothesisCheck& find_check(const ValidationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  throw std::runtime_error("missing check " + name);
}

}  // namespace

TEST_CASE("builtin models reproduce their closed forms") {
  auto quad = make_model(ModelSpec::from_builtin("quadratic"));
  CHECK(eval(quad, Quantity::h, 0.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(eval(quad, Quantity::h, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(quad.h1() == doctest::Approx(2.0));
  CHECK(quad.hprime1() == doctest::Approx(1.0));
  CHECK(quad.h0() == doctest::Approx(1.0));

  auto ex5 = make_model(ModelSpec::from_builtin("example5"));
  // g(0) = (1 - 0)(1/2 + 0)
  CHECK(eval(ex5, Quantity::h, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ex5.h1() == doctest::Approx(1.5));
}

TEST_CASE("unknown builtin and empty polynomial are rejected") {
  CHECK_THROWS_AS(make_model(ModelSpec::from_builtin("cubic")), ModelError);
  CHECK_THROWS_AS(make_model(ModelSpec::from_poly({})), ModelError);
}

TEST_CASE("validation accepts builtins and rejects linear g") {
  CHECK(validate(make_model(ModelSpec::from_builtin("quadratic"))).all_passed());
  CHECK(validate(make_model(ModelSpec::from_builtin("example5"))).all_passed());
  auto lin = make_model(ModelSpec::from_poly({1.0, -1.0}));
  auto report = validate(lin);
  CHECK_FALSE(report.all_passed());
  CHECK_FALSE(find_check(report, "g''<0").passed);
  CHECK(find_check(report, "g(1)=0").passed);
}

TEST_CASE("validation flags a model without an equilibrium root") {
  auto bad = make_model(ModelSpec::from_poly({1.0, 0.0, -0.5}));
  CHECK_FALSE(find_check(validate(bad), "g(1)=0").passed);
}

TEST_CASE("eval rejects arguments outside the unit interval") {
  auto quad = make_model(ModelSpec::from_builtin("quadratic"));
  CHECK_THROWS_AS(eval(quad, Quantity::g, -0.1), DomainError);
  CHECK_THROWS_AS(eval(quad, Quantity::h, 1.1), DomainError);
}

TEST_CASE("h matches g/(1-z) away from the removable singularity") {
  for (const char* name : {"quadratic", "example5"}) {
    auto m = make_model(ModelSpec::from_builtin(name));
    for (int i = 0; i <= 1000; ++i) {
      const double z = i / 1000.0;
      if (z > 1.0 - 1e-3) break;
      CHECK(std::abs(m.h(z) - m.g(z) / (1.0 - z)) <= 1e-10);
    }
  }
  // cubic with a nontrivial deflation: g = (1-z)(1 + z + z^2) = 1 - z^3
  auto cubic = make_model(ModelSpec::from_poly({1.0, 0.0, 0.0, -1.0}));
  CHECK(cubic.h(0.3) == doctest::Approx(1.0 + 0.3 + 0.09).epsilon(1e-14));
  CHECK(cubic.h1() == doctest::Approx(3.0));
  CHECK(cubic.hprime1() == doctest::Approx(3.0));
}

TEST_CASE("h and h' are continuous across the limit window") {
  auto m = make_model(ModelSpec::from_builtin("example5"));
  CHECK(std::abs(m.h(1.0 - 2e-7) - m.h(1.0 - 5e-8)) < 1e-6);
  CHECK(std::abs(m.h_prime(1.0 - 2e-7) - m.h_prime(1.0 - 5e-8)) < 1e-6);
}

TEST_CASE("h_inverse") {
  auto quad = make_model(ModelSpec::from_builtin("quadratic"));
  auto ex5 = make_model(ModelSpec::from_builtin("example5"));
  CHECK(h_inverse(quad, 1.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h_inverse(quad, quad.h1()) == 1.0);
  CHECK(h_inverse(ex5, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(h_inverse(quad, 0.5), DomainError);
  CHECK_THROWS_AS(h_inverse(quad, 2.5), DomainError);
  for (auto* m : {&quad, &ex5}) {
    for (int i = 0; i <= 1000; ++i) {
      const double z = i / 1000.0;
      CHECK(std::abs(h_inverse(*m, m->h(z)) - z) <= 1e-9);
    }
  }
}

TEST_CASE("f in slope coordinates") {
  auto quad = make_model(ModelSpec::from_builtin("quadratic"));
  auto ex5 = make_model(ModelSpec::from_builtin("example5"));
  CHECK(f_eval(quad, 2.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(std::abs(f_eval(ex5, 1.0)) <= 1e-15);
  CHECK(ex5.f_prime_infinity() == doctest::Approx(0.5));
  CHECK(quad.f_prime(1.0) == doctest::Approx(quad.h1()));
  CHECK_THROWS_AS(f_eval(quad, 0.5), DomainError);
  for (auto* m : {&quad, &ex5}) {
    for (int i = 0; i <= 990; ++i) {
      const double w = 1.0 + i * 0.1;
      CHECK(std::abs(f_eval(*m, w) / w - m->g(1.0 / w)) <= 1e-12);
    }
  }
}
