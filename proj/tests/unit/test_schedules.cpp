#include <doctest.h>

#include <cmath>

#include "arcd/schedules.hpp"

using namespace arcd;

TEST_CASE("sarcd general: formula values") {
  const auto p0 = sarcd_general_params(0, 3, 2.0, 0.5);
  CHECK(p0.alpha_t == 1.0);
  CHECK(p0.L_t == doctest::Approx(0.5 + 3 * 2.0));
  const auto p2 = sarcd_general_params(2, 1, 1.0, 1.0);
  CHECK(p2.alpha_t == 0.5);
  CHECK(p2.L_t == doctest::Approx(6.19615).epsilon(1e-6));
  CHECK_THROWS_AS(sarcd_general_params(-1, 1, 1.0, 1.0), ScheduleError);
  CHECK_THROWS_AS(sarcd_general_params(0, 1, 1.0, 0.0), ConfigError);
}

TEST_CASE("sarcd general: monotone, precondition and ratio inequality") {
  const std::size_t n = 4;
  const double L = 1.5;
  auto prev = sarcd_general_params(0, n, L, 1.0);
  CHECK(prev.L_t > n * L);
  for (std::int64_t t = 1; t <= 10000; ++t) {
    const auto p = sarcd_general_params(t, n, L, 1.0);
    CHECK(p.alpha_t < prev.alpha_t);
    CHECK(p.L_t > prev.L_t);
    CHECK(p.L_t > n * L);
    CHECK((1 - p.alpha_t) / (p.alpha_t * p.alpha_t) <=
          1.0 / (prev.alpha_t * prev.alpha_t));
    prev = p;
  }
}

TEST_CASE("sarcd strong: first steps match the hand recursion") {
  const auto p0 = sarcd_strong_params(1.0, 0, 2, 1.0, 0.4);
  CHECK(p0.alpha_t == 1.0);
  CHECK(p0.lambda_t == 1.0);
  CHECK(p0.L_t == doctest::Approx(2 * 1.0 + 2 * 0.4 / 4.0));

  const auto p1 = sarcd_strong_params(p0.lambda_t, 1, 2, 1.0, 0.4);
  CHECK(p1.alpha_t == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-15));
  CHECK(p1.lambda_t == doctest::Approx(0.381966).epsilon(1e-6));
  // L_1 equals L_0
  CHECK(p1.L_t == doctest::Approx(p0.L_t).epsilon(1e-15));

  const auto p2 = sarcd_strong_params(p1.lambda_t, 2, 2, 1.0, 0.4);
  CHECK(p2.alpha_t == doctest::Approx(0.455887).epsilon(1e-6));
  CHECK(p2.lambda_t == doctest::Approx(0.207833).epsilon(1e-6));
  CHECK(p2.alpha_t * p2.alpha_t == doctest::Approx(p2.lambda_t).epsilon(1e-12));
}

TEST_CASE("sarcd strong: identities (a)-(d) for t = 1..1e4") {
  Schedule s(ScheduleKind::SarcdStrong, 3, 1.0, 0.2);
  ScheduleParams prev = s.advance(0);
  for (std::int64_t t = 1; t <= 10000; ++t) {
    const ScheduleParams p = s.advance(t);
    const double a = p.alpha_t;
    CHECK(std::abs(a * a - p.lambda_t) <= 1e-12 * p.lambda_t);
    if (t >= 2) {
      const double rhs = 1.0 / (prev.alpha_t * prev.alpha_t);
      CHECK(std::abs((1 - a) / (a * a) - rhs) <= 1e-10 * rhs);
      // (c) with L_t written via lambda_{t-1} = alpha_{t-1}^2
      const double expect = p.a_n * p.mu / (9.0 * prev.alpha_t);
      CHECK(std::abs((p.L_t - prev.L_t) - expect) <= 1e-10 * expect);
    }
    CHECK(a <= 2.0 / (static_cast<double>(t) + 2.0));
    CHECK(p.L_t > p.a_n * p.L);
    prev = p;
  }
}

TEST_CASE("sarcd strong: guards") {
  CHECK_THROWS_AS(sarcd_strong_params(1.0, 1, 2, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(sarcd_strong_params(0.0, 3, 2, 1.0, 0.1), ScheduleError);
  CHECK_THROWS_AS(sarcd_strong_params(1.5, 3, 2, 1.0, 0.1), ScheduleError);
  // lambda near the bottom of the normal range underflows
  CHECK_THROWS_AS(sarcd_strong_params(1e-308, 3, 2, 1.0, 0.1), ScheduleError);
}

TEST_CASE("oarcd general: formula values and precondition") {
  CHECK(oarcd_general_params(1, 3.0, 0.5).L_t == 3.0);
  CHECK(oarcd_general_params(5, 2.0, 0.5).L_t == 4.0);
  CHECK(oarcd_general_params(5, 2.0, 0.5).alpha_t == 0.5);
  for (std::int64_t t = 2; t < 1000; ++t) {
    CHECK(oarcd_general_params(t, 2.0, 0.3).L_t > 2.0);
  }
  CHECK_THROWS_AS(oarcd_general_params(1, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(oarcd_general_params(1, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(oarcd_general_params(0, 1.0, 0.5), ScheduleError);
}

TEST_CASE("oarcd strong: linear schedule") {
  CHECK(oarcd_strong_params(1, 1.0, 2.0, 0.5).L_t == 2.0);
  for (std::int64_t t = 1; t < 200; ++t) {
    const double d = oarcd_strong_params(t + 1, 1.0, 0.3, 0.4).L_t -
                     oarcd_strong_params(t, 1.0, 0.3, 0.4).L_t;
    CHECK(d == doctest::Approx(0.4 * 0.3).epsilon(1e-12));
  }
  CHECK_THROWS_AS(oarcd_strong_params(1, 1.0, 0.0, 0.5), ConfigError);
}

TEST_CASE("Schedule fixes a(n), b(n) per kind and advances in order") {
  Schedule sg(ScheduleKind::SarcdGeneral, 4, 1.0, 0.0, 2.0);
  CHECK(sg.current().a_n == 4.0);
  CHECK(sg.current().b_n == 0.25);
  CHECK(sg.first_step() == 0);
  Schedule og(ScheduleKind::OarcdGeneral, 4, 1.0);
  CHECK(og.current().a_n == 2.0);
  CHECK(og.current().b_n == 1.0);
  CHECK(og.first_step() == 1);
  Schedule os(ScheduleKind::OarcdStrong, 4, 1.0, 0.1);
  CHECK(os.current().a_n == 4.0);
  CHECK(os.current().b_n == 1.0);
  Schedule ss(ScheduleKind::SarcdStrong, 4, 1.0, 0.1);
  CHECK(ss.current().b_n == 0.25);

  CHECK(sg.advance(0).L_t == doctest::Approx(2.0 + 4.0));
  CHECK_THROWS_AS(sg.advance(2), ScheduleError);
  CHECK(sg.advance(1).alpha_t == doctest::Approx(2.0 / 3.0));
  CHECK(sg.peek(5).alpha_t == doctest::Approx(2.0 / 7.0));

  CHECK_THROWS_AS(Schedule(ScheduleKind::OarcdStrong, 2, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(Schedule(ScheduleKind::SarcdStrong, 2, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(Schedule(ScheduleKind::OarcdGeneral, 2, 1.0, 0.0, 1.0, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(Schedule(ScheduleKind::SarcdGeneral, 0, 1.0), ConfigError);
}

TEST_CASE("schedule_kind maps protocol and regime") {
  CHECK(schedule_kind(Setting::Stochastic, Regime::General) == ScheduleKind::SarcdGeneral);
  CHECK(schedule_kind(Setting::Stochastic, Regime::Strong) == ScheduleKind::SarcdStrong);
  CHECK(schedule_kind(Setting::Online, Regime::General) == ScheduleKind::OarcdGeneral);
  CHECK(schedule_kind(Setting::Online, Regime::Strong) == ScheduleKind::OarcdStrong);
}
