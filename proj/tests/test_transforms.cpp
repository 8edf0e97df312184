#include "doctest.h"

#include <cmath>

#include "erodewave/error.hpp"
#include "erodewave/initial_data.hpp"
#include "erodewave/transforms.hpp"

using namespace erodewave;

namespace {

ZProfile box_profile() {
  // z = 0 on (0, 0.6], 1 elsewhere
  return ZProfile{{-1.0, 0.0, 0.0, 0.6, 0.6, 2.0}, {1.0, 1.0, 0.0, 0.0, 1.0, 1.0}};
}

}  // namespace

TEST_CASE("total drop") {
  CHECK(total_drop(ZProfile{{0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}}) == 0.0);
  CHECK(total_drop(box_profile()) == doctest::Approx(0.6).epsilon(1e-14));
  // corrected experiment data, closed form 0.6 + 2 exp(-0.355)
  const double exact = 0.6 + 2.0 * std::exp(-0.355);
  CHECK(experiment_initial_data().total_drop() == doctest::Approx(exact).epsilon(1e-13));
  CHECK(std::abs(exact - 2.00234688641714479936) < 1e-13);
  auto data = experiment_initial_data();
  auto zp = data.sample(0.0, 80.0, 400001);
  zp.z.front() = 0.0;  // right limit at u = 0
  CHECK(total_drop(zp) == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("u_to_q maps a zero stretch to a shock of equal length") {
  const QProfile qp = u_to_q(box_profile());
  CHECK(qp.total_drop == doctest::Approx(0.6));
  CHECK(qp.eval(-0.3) == 0.0);
  CHECK(qp.eval_right(-0.6) == 0.0);
  CHECK(qp.eval(0.0) == 0.0);  // left limit at the jump back to 1
  CHECK(qp.eval_right(0.0) == 1.0);
  CHECK(u_to_q(ZProfile{{0.0, 1.0}, {1.0, 1.0}}).q.empty());
  CHECK_THROWS_AS(u_to_q(ZProfile{{0.0, 1.0, 2.0}, {0.5, 0.2, 1.0}}), DomainError);
}

TEST_CASE("q_to_u") {
  QProfile shock{0.7, {-0.7, 0.0, 0.0}, {0.0, 0.0, 1.0}};
  auto zp = q_to_u(shock, 0.0);
  CHECK(zp.u.back() - zp.u.front() == doctest::Approx(0.7));
  QProfile half{1.0, {-1.0, -0.5, 0.0}, {0.5, 0.5, 0.5}};
  auto zh = q_to_u(half, 3.0);
  CHECK(zh.u.back() == 3.0);
  CHECK(zh.u.back() - zh.u.front() == doctest::Approx(2.0));
  QProfile near_one{1e-3, {-1e-3, 0.0}, {1.0 - 1e-9, 1.0 - 1e-9}};
  auto zc = q_to_u(near_one, 0.0);
  CHECK(zc.z.front() == doctest::Approx(1.0 - 1e-6).epsilon(1e-15));
  CHECK(zc.u.back() - zc.u.front() == doctest::Approx(1e-3 / 1e-6));
}

TEST_CASE("round trip between u and q") {
  ZProfile zp;
  for (int k = 0; k <= 400; ++k) {
    const double u = 0.01 * k;
    zp.u.push_back(u);
    zp.z.push_back(std::min(1.0, 0.2 + 0.8 * (1.0 - std::exp(-u))));
  }
  const QProfile qp = u_to_q(zp);
  const ZProfile back = q_to_u(qp, zp.u.back(), 0.0);
  REQUIRE(back.u.size() == zp.u.size());
  for (std::size_t i = 0; i < zp.u.size(); ++i) {
    if (zp.z[i] > 1.0 - 1e-3) continue;
    CHECK(std::abs(back.u[i] - zp.u[i]) <= 1e-8);
    CHECK(back.z[i] == zp.z[i]);
  }
  // exact on a shock
  const QProfile box = u_to_q(box_profile());
  const QProfile box2 = u_to_q(q_to_u(box, 5.0));
  CHECK(box2.total_drop == doctest::Approx(box.total_drop).epsilon(1e-15));
}

TEST_CASE("height reconstruction") {
  auto hc = reconstruct_height(box_profile());
  CHECK(hc.total_drop == doctest::Approx(0.6));
  bool jump_seen = false;
  for (std::size_t i = 0; i + 1 < hc.vertices.size(); ++i) {
    CHECK(hc.vertices[i + 1].x >= hc.vertices[i].x - 1e-15);
    CHECK(hc.vertices[i + 1].u >= hc.vertices[i].u);
    if (hc.vertices[i].jump) {
      jump_seen = true;
      CHECK(hc.vertices[i + 1].x == doctest::Approx(hc.vertices[i].x));
      CHECK(hc.vertices[i + 1].u - hc.vertices[i].u == doctest::Approx(0.6));
    }
  }
  CHECK(jump_seen);
  // right asymptote u = x, left asymptote u = x - D
  CHECK(hc.vertices.back().u - hc.vertices.back().x == doctest::Approx(0.0));
  CHECK(hc.vertices.front().u - hc.vertices.front().x == doctest::Approx(-0.6));
  auto flat = reconstruct_height(ZProfile{{0.0, 1.0}, {1.0, 1.0}}, 2.0);
  CHECK(flat.vertices[1].u - flat.vertices[1].x == doctest::Approx(-2.0));
}

TEST_CASE("level crossing and mean position") {
  ZProfile zp{{0.0, 1.0, 2.0}, {0.0, 0.5, 1.0}};
  CHECK(level_crossing(zp, 0.25) == doctest::Approx(0.5));
  CHECK(std::isnan(level_crossing(zp, 1.5)));
  QProfile shock{0.7, {-0.7, 0.0, 0.0}, {0.0, 0.0, 1.0}};
  auto zs = q_to_u(shock, 1.0);
  // x = u - q is constant (= 1) over a shock
  CHECK(mean_x(shock, zs) == doctest::Approx(1.0));
}

TEST_CASE("initial data validation and inversion") {
  auto data = experiment_initial_data();
  const double D = data.total_drop();
  CHECK(data.zeta(-D + 0.3) == 0.0);
  CHECK(data.zeta(0.0) == 1.0);
  // q(u) for u > 0.6 is -2 exp(-(u + 0.11)/2), so zeta(q) = 1 + q/2 there
  for (double q : {-1.2, -0.8, -0.1, -1e-3})
    CHECK(data.zeta(q) == doctest::Approx(1.0 + q / 2.0).epsilon(1e-10));
  InitialPiece bad;
  bad.kind = InitialPiece::Kind::constant;
  bad.value = 0.5;
  CHECK_THROWS_AS(InitialData({bad}), ModelError);
  InitialPiece decay;
  decay.kind = InitialPiece::Kind::exponential;
  decay.base = 0.0;
  decay.amp = 1.0;
  decay.rate = -0.5;
  decay.upper = 10.0;
  // the uncorrected data decays toward 0 and is rejected as non-monotone
  CHECK_THROWS_AS(InitialData({decay}), ModelError);
}
