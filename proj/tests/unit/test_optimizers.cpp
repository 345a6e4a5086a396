#include <doctest.h>

#include <cmath>

#include "arcd/optimizers.hpp"
#include "arcd/schedules.hpp"
#include "helpers.hpp"

using namespace arcd;
using testing::dense;

namespace {

std::shared_ptr<const Dataset> random_rows(std::size_t n, std::size_t m,
                                           std::uint64_t seed) {
  Rng rng(seed);
  DatasetBuilder b(true);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto& v : row) v = rng.normal();
    b.add_dense_row(row, rng.normal());
  }
  b.set_cols(n);
  return testing::share(std::move(b).build());
}

OptimizerState random_state(std::size_t n, Convention c, std::uint64_t seed) {
  Rng rng(seed);
  Vector y(n), z(n);
  for (auto& v : y) v = rng.normal();
  for (auto& v : z) v = rng.normal();
  auto s = init_state(n, c, y);
  s.z = z;
  return s;
}

std::size_t count_diff(const Vector& a, const Vector& b) {
  std::size_t c = 0;
  for (std::size_t k = 0; k < a.size(); ++k) c += a[k] != b[k];
  return c;
}

}  // namespace

TEST_CASE("sarcd single-iteration hand oracle") {
  LossModel loss(LossKind::Squared, dense({{1.0}}, {3.0}));
  Schedule sched(ScheduleKind::SarcdGeneral, 1, 1.0, 0.0, 1.0);
  const auto& p = sched.advance(0);
  CHECK(p.L_t == 2.0);
  CHECK(z_step_coefficient(p, Flavor::Stochastic) == 0.5);
  auto s = init_state(1, Convention::Stochastic);
  const auto rep = accelerated_coordinate_update(s, p, loss, Flavor::Stochastic, 0, 0);
  CHECK(s.x == Vector{0.0});
  CHECK(rep.partial == -3.0);
  CHECK(s.y == Vector{1.5});
  CHECK(s.z == Vector{1.5});
  CHECK(s.t == 0);
  CHECK(rep.t == 0);
  CHECK(rep.delta_norm == 3.0);
}

TEST_CASE("oarcd single-iteration hand oracle") {
  LossModel loss(LossKind::Squared, dense({{1.0}}, {0.0}));
  Schedule sched(ScheduleKind::OarcdGeneral, 1, 1.0, 0.0, 1.0, 0.5);
  const auto& p = sched.advance(1);
  CHECK(p.L_t == 1.0);
  CHECK(p.a_n == 1.0);
  CHECK(z_step_coefficient(p, Flavor::Online) == 0.5);
  const Vector start{2.0};
  auto s = init_state(1, Convention::Online, start);
  CoordinateSampler sampler(1, 1);
  const auto rep = oarcd_step(s, p, loss, 0, sampler);
  CHECK(s.x == Vector{2.0});
  CHECK(rep.partial == 2.0);
  CHECK(s.y == Vector{0.0});
  CHECK(s.z == Vector{1.0});
  CHECK(s.t == 1);
}

TEST_CASE("closed-form argmin touches only the drawn coordinate") {
  // residual at x = 0 is <a,0> - (-1) = 1, so g = a = (1,1,1)
  LossModel loss(LossKind::Squared, dense({{1, 1, 1}}, {-1}));
  Schedule sched(ScheduleKind::SarcdGeneral, 3, 3.0, 0.0, 1.0);
  const auto& p = sched.advance(0);
  auto s = init_state(3, Convention::Stochastic);
  const auto rep = accelerated_coordinate_update(s, p, loss, Flavor::Stochastic, 0, 2);
  CHECK(rep.partial == 1.0);
  CHECK(s.y[0] == 0.0);
  CHECK(s.y[1] == 0.0);
  CHECK(s.y[2] == doctest::Approx(-p.a_n / p.L_t).epsilon(1e-15));
  CHECK(rep.y_written == 1);
  CHECK(rep.z_written == 1);
}

TEST_CASE("zero partial leaves y at x and z unchanged") {
  LossModel loss(LossKind::Squared, dense({{1, 0}}, {0}));
  for (auto kind : {ScheduleKind::SarcdGeneral, ScheduleKind::OarcdGeneral}) {
    Schedule sched(kind, 2, 1.0);
    const auto& p = sched.advance(sched.first_step());
    const auto conv = kind == ScheduleKind::SarcdGeneral ? Convention::Stochastic
                                                         : Convention::Online;
    const auto flavor = kind == ScheduleKind::SarcdGeneral ? Flavor::Stochastic
                                                           : Flavor::Online;
    auto s = random_state(2, conv, 5);
    s.y[0] = s.z[0] = 0.0;  // x[0] = 0, residual 0
    const Vector z_before = s.z;
    accelerated_coordinate_update(s, p, loss, flavor, 0, 0);
    CHECK(s.y == s.x);
    CHECK(s.z == z_before);
  }
}

TEST_CASE("expected one-step identity by exhaustive enumeration") {
  for (std::size_t n : {2u, 3u, 5u}) {
    for (std::size_t m : {1u, 4u, 10u}) {
      const auto data = random_rows(n, m, 100 + n * 10 + m);
      for (double mu : {0.0, 0.2}) {
        LossModel loss(LossKind::Squared, data, mu);
        const auto kind = mu > 0 ? ScheduleKind::SarcdStrong : ScheduleKind::SarcdGeneral;
        Schedule sched(kind, n, loss.smoothness(), mu);
        sched.advance(0);
        const auto p = sched.advance(1);
        const auto base = random_state(n, Convention::Stochastic, 7);
        Vector avg(n, 0.0);
        Vector x;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t k = 0; k < n; ++k) {
            auto s = base;
            accelerated_coordinate_update(s, p, loss, Flavor::Stochastic, i, k);
            x = s.x;
            for (std::size_t j = 0; j < n; ++j) avg[j] += s.y[j];
          }
        }
        const Vector g = loss.objective_gradient(x);
        for (std::size_t j = 0; j < n; ++j) {
          avg[j] /= static_cast<double>(n * m);
          const double expect = x[j] - p.a_n / (static_cast<double>(n) * p.L_t) * g[j];
          CHECK(std::abs(avg[j] - expect) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("first-order condition and sparsity over random steps") {
  const std::size_t n = 6;
  const auto data = random_rows(n, 30, 3);
  for (double mu : {0.0, 0.3}) {
    for (auto setting : {Setting::Stochastic, Setting::Online}) {
      LossModel loss(LossKind::Squared, data, mu);
      const Regime regime = mu > 0 ? Regime::Strong : Regime::General;
      Schedule sched(schedule_kind(setting, regime), n, loss.smoothness(), mu);
      const Flavor flavor = setting == Setting::Online ? Flavor::Online : Flavor::Stochastic;
      auto s = init_state(n, setting == Setting::Online ? Convention::Online
                                                         : Convention::Stochastic);
      CoordinateSampler coords(n, 4);
      SampleStream samples(30, SampleMode::Uniform, 4);
      for (std::int64_t t = sched.first_step(); t < sched.first_step() + 500; ++t) {
        const auto& p = sched.advance(t);
        const Vector z_prev = s.z;
        const auto rep = accelerated_coordinate_update(s, p, loss, flavor,
                                                       samples.next(), coords.draw());
        const std::size_t k = rep.coordinate;
        const double foc = p.a_n * rep.partial + p.L_t * (s.y[k] - s.x[k]);
        CHECK(std::abs(foc) <= 1e-12 * (1.0 + p.a_n * std::abs(rep.partial)));
        CHECK(count_diff(s.y, s.x) <= 1);
        CHECK(rep.y_written == 1);
        if (mu == 0.0) {
          CHECK(count_diff(s.z, z_prev) <= 1);
          CHECK(rep.z_written == 1);
        } else {
          CHECK(rep.z_written == n);
        }
      }
    }
  }
}

TEST_CASE("non-finite partial raises a step error with context") {
  LossModel loss(LossKind::Squared, dense({{1e308}}, {1e308}));
  Schedule sched(ScheduleKind::SarcdGeneral, 1, 1.0);
  auto s = init_state(1, Convention::Stochastic);
  try {
    accelerated_coordinate_update(s, sched.advance(0), loss, Flavor::Stochastic, 0, 0);
    FAIL("expected StepError");
  } catch (const StepError& e) {
    CHECK(std::string(e.what()).find("sample 0") != std::string::npos);
  }
}

TEST_CASE("step rejects mismatched schedule and state dimensions") {
  LossModel loss(LossKind::Squared, dense({{1, 2}}, {0}));
  Schedule wrong(ScheduleKind::SarcdGeneral, 3, 1.0);
  auto s = init_state(2, Convention::Stochastic);
  CHECK_THROWS_AS(
      accelerated_coordinate_update(s, wrong.advance(0), loss, Flavor::Stochastic, 0, 0),
      ConfigError);
  Schedule right(ScheduleKind::SarcdGeneral, 2, 1.0);
  CHECK_THROWS_AS(
      accelerated_coordinate_update(s, right.advance(0), loss, Flavor::Stochastic, 3, 0),
      ConfigError);
}

TEST_CASE("lazy scaled iterates reproduce the dense update") {
  const std::size_t n = 8;
  const auto data = random_rows(n, 40, 12);
  LossModel loss(LossKind::Squared, data, 0.0);
  for (auto setting : {Setting::Stochastic, Setting::Online}) {
    Schedule sched(schedule_kind(setting, Regime::General), n, loss.smoothness());
    const Flavor flavor = setting == Setting::Online ? Flavor::Online : Flavor::Stochastic;
    auto s = init_state(n, setting == Setting::Online ? Convention::Online
                                                       : Convention::Stochastic);
    LazyIterates lazy(s);
    CoordinateSampler coords(n, 77);
    SampleStream samples(40, SampleMode::Uniform, 77);
    for (std::int64_t t = sched.first_step(); t < sched.first_step() + 2000; ++t) {
      const auto& p = sched.advance(t);
      const std::size_t i = samples.next();
      const std::size_t k = coords.draw();
      const auto a = accelerated_coordinate_update(s, p, loss, flavor, i, k);
      const auto b = lazy.step(p, loss, flavor, i, k);
      CHECK(b.partial == doctest::Approx(a.partial).epsilon(1e-9));
      CHECK(b.y_written == 1);
      CHECK(b.z_written == 1);
    }
    const auto m = lazy.materialize();
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(m.y[j] == doctest::Approx(s.y[j]).epsilon(1e-9));
      CHECK(m.z[j] == doctest::Approx(s.z[j]).epsilon(1e-9));
      CHECK(m.x[j] == doctest::Approx(s.x[j]).epsilon(1e-9));
      CHECK(lazy.y_at(j) == doctest::Approx(s.y[j]).epsilon(1e-9));
    }
    CHECK(m.t == s.t);
    CHECK(lazy.y_margin(loss, 3) == doctest::Approx(loss.margin(s.y, 3)).epsilon(1e-9));
  }
}

TEST_CASE("lazy iterates require mu = 0") {
  LossModel loss(LossKind::Squared, dense({{1, 2}}, {0}), 0.5);
  Schedule sched(ScheduleKind::OarcdStrong, 2, loss.smoothness(), 0.5);
  LazyIterates lazy(init_state(2, Convention::Online));
  CHECK_THROWS_AS(lazy.step(sched.advance(1), loss, Flavor::Online, 0, 0), ConfigError);
}

TEST_CASE("sarcd_step draws its own sample and coordinate reproducibly") {
  const auto data = random_rows(4, 10, 1);
  LossModel loss(LossKind::Squared, data);
  auto run = [&] {
    Schedule sched(ScheduleKind::SarcdGeneral, 4, loss.smoothness());
    CoordinateSampler coords(4, 5);
    SampleStream samples(10, SampleMode::Uniform, 6);
    auto s = init_state(4, Convention::Stochastic);
    for (std::int64_t t = 0; t < 50; ++t) sarcd_step(s, sched.advance(t), loss, coords, samples);
    return s;
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.y == b.y);
  CHECK(a.z == b.z);
  CHECK(a.t == 49);
}
