#include "arcd/runner.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "arcd/baselines.hpp"
#include "arcd/schedules.hpp"

namespace arcd {

std::vector<std::size_t> online_rounds(std::size_t m, std::int64_t horizon) {
  if (m == 0) throw DataError("online rounds: dataset has no rows");
  std::vector<std::size_t> out(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)));
  SampleStream stream(m, SampleMode::Sequential, 0);
  for (auto& s : out) s = stream.next();
  return out;
}

double balanced_b(const LossModel& loss, std::span<const double> start,
                  std::span<const double> y_star) {
  const double sigma = gradient_noise(loss, start);
  double d2 = 0.0;
  for (std::size_t k = 0; k < start.size(); ++k) {
    const double d = start[k] - y_star[k];
    d2 += d * d;
  }
  if (!(sigma > 0.0) || !(d2 > 0.0)) return 1.0;
  return sigma * std::sqrt(2.0 / (3.0 * static_cast<double>(start.size()) * d2));
}

namespace {

double squared_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double e : v) acc += e * e;
  return acc;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    acc += d * d;
  }
  return std::sqrt(acc);
}

bool is_accelerated(Algorithm a) {
  return a == Algorithm::Sarcd || a == Algorithm::Oarcd || a == Algorithm::Sage;
}

/// Online/stochastic iterate holder hiding the dense/lazy split.
class Iterates {
 public:
  Iterates(OptimizerState state, bool lazy) : state_(std::move(state)) {
    if (lazy) lazy_.emplace(state_);
  }

  bool lazy() const { return lazy_.has_value(); }
  OptimizerState& dense() { return state_; }
  LazyIterates& scaled() { return *lazy_; }

  double y_margin(const LossModel& loss, std::size_t i) const {
    return lazy_ ? lazy_->y_margin(loss, i) : loss.margin(state_.y, i);
  }
  double y_squared_norm() const {
    return lazy_ ? squared_norm(lazy_->y()) : squared_norm(state_.y);
  }
  OptimizerState snapshot() const {
    return lazy_ ? lazy_->materialize() : state_;
  }
  Vector y() const { return lazy_ ? lazy_->y() : state_.y; }

  bool written_finite(const StepReport& r) const {
    if (lazy_) {
      return std::isfinite(lazy_->y_at(r.coordinate)) &&
             std::isfinite(lazy_->z_at(r.coordinate));
    }
    if (r.y_written == 1 && r.z_written == 1) {
      return std::isfinite(state_.y[r.coordinate]) &&
             std::isfinite(state_.z[r.coordinate]);
    }
    return state_.finite();
  }

 private:
  OptimizerState state_;
  std::optional<LazyIterates> lazy_;
};

}  // namespace

RunTrace run(const RunConfig& config, std::shared_ptr<const Dataset> data,
             const RunOptions& options) {
  config.validate();
  if (!data) throw ConfigError("run: no dataset");
  const double mu = config.effective_mu();
  const LossModel loss(config.loss, std::move(data), mu);
  const double L = loss.smoothness();
  const std::size_t n = loss.dim();
  const std::size_t m = loss.samples();
  const std::int64_t T = config.horizon;
  const std::int64_t K = config.emit_cadence();
  const Algorithm algo = config.algorithm;
  const bool diag = config.diagnostics;

  RunTrace trace;
  trace.config = config;
  trace.setting = config.setting();
  trace.n = n;
  trace.m = m;
  const bool online = trace.setting == Setting::Online;
  if (online) {
    trace.rounds = online_rounds(m, T);
    trace.wrapped = T > static_cast<std::int64_t>(m);
  }

  if (options.comparator) {
    trace.comparator = *options.comparator;
  } else if (!online) {
    trace.comparator = comparator_full(loss);
  } else if (T > 0) {
    trace.comparator = comparator_for_rounds(loss, trace.rounds);
  }
  const bool have_star = trace.comparator.y.size() == n;
  if (!online && have_star) trace.f_star = loss.objective(trace.comparator.y);
  const Vector& y_star = trace.comparator.y;

  CoordinateSampler coords(n, derive_seed(config.seed, stream::kCoordinate));
  SampleStream samples(m, config.sample_mode(),
                       derive_seed(config.seed, stream::kData));

  const Flavor flavor = online ? Flavor::Online : Flavor::Stochastic;
  trace.b_used = config.b;
  if (config.auto_b && diag && have_star && !online &&
      config.regime == Regime::General) {
    trace.b_used = balanced_b(loss, Vector(n, 0.0), y_star);
  }
  std::optional<Schedule> schedule;
  if (is_accelerated(algo)) {
    const std::size_t schedule_n = algo == Algorithm::Sage ? 1 : n;
    schedule.emplace(schedule_kind(trace.setting, config.regime), schedule_n,
                     L, mu, trace.b_used, config.alpha);
  }
  BaselineConfig rule;
  if (!is_accelerated(algo)) rule = baseline_config(config.regime, config.eta_c, mu);

  const bool lazy =
      config.lazy && (algo == Algorithm::Sarcd || algo == Algorithm::Oarcd);
  Iterates it(init_state(n, online ? Convention::Online : Convention::Stochastic),
              lazy);

  MeasuredConstants& mc = trace.measured;
  mc.L = L;
  auto loss_at = [&](double margin, std::size_t i, double y_sq) {
    double v = loss.data_loss(margin, i);
    if (mu > 0.0) v += 0.5 * mu * y_sq;
    return v;
  };
  auto track_distance = [&]() {
    if (!diag || !have_star) return;
    const OptimizerState s = it.snapshot();
    const Vector& anchor = is_accelerated(algo) ? s.z : s.y;
    mc.D = std::max(mc.D, distance(y_star, anchor));
  };
  auto gradient_norm = [&](std::span<const double> at, std::size_t i) {
    return std::sqrt(squared_norm(loss.gradient(at, i)));
  };

  double cumulative = 0.0;
  double cumulative_strict = 0.0;
  std::uint64_t touched = 0;
  auto emit = [&](std::int64_t t, double step_loss, double strict) {
    TraceRow row;
    row.t = t;
    row.loss = step_loss;
    row.cumulative_loss = cumulative;
    row.loss_strict = strict;
    row.cumulative_strict = cumulative_strict;
    row.coords_touched = touched;
    if (!online) {
      const Vector y = it.y();
      row.objective = loss.objective(y);
      if (diag && t > 0) {
        mc.sigma = std::max(mc.sigma, gradient_noise(loss, it.snapshot().x));
      }
    }
    trace.rows.push_back(row);
    trace.row_wall_ns.push_back(trace.step_ns);
  };

  track_distance();
  emit(0, 0.0, 0.0);
  if (online) {
    trace.round_loss.reserve(static_cast<std::size_t>(T));
    trace.round_loss_strict.reserve(static_cast<std::size_t>(T));
    trace.round_margin.reserve(static_cast<std::size_t>(T));
  }
  if (options.record_steps) trace.reports.reserve(static_cast<std::size_t>(T));

  using clock = std::chrono::steady_clock;
  for (std::int64_t i = 1; i <= T; ++i) {
    const std::size_t s = online ? trace.rounds[static_cast<std::size_t>(i - 1)]
                                 : samples.next();
    double strict = 0.0;
    if (online) {
      const double pre_margin = it.y_margin(loss, s);
      strict = loss_at(pre_margin, s, mu > 0.0 ? it.y_squared_norm() : 0.0);
      trace.round_margin.push_back(pre_margin);
      if (diag) mc.R = std::max(mc.R, gradient_norm(it.y(), s));
    }

    StepReport rep;
    const auto start = clock::now();
    switch (algo) {
      case Algorithm::Sarcd:
      case Algorithm::Oarcd: {
        const auto& p = schedule->advance(online ? i : i - 1);
        const std::size_t k = coords.draw();
        rep = it.lazy() ? it.scaled().step(p, loss, flavor, s, k)
                        : accelerated_coordinate_update(it.dense(), p, loss,
                                                        flavor, s, k);
        break;
      }
      case Algorithm::Sage: {
        const auto& p = schedule->advance(online ? i : i - 1);
        rep = sage_step(it.dense(), p, loss, flavor, s);
        break;
      }
      case Algorithm::Ogd:
      case Algorithm::Sgd: {
        rep.y_written = ogd_step(it.dense().y, loss, s, rule, i);
        break;
      }
      case Algorithm::Orbcd: {
        rep.coordinate = coords.draw();
        rep.partial =
            orbcd_update(it.dense().y, loss, s, rep.coordinate, rule, i);
        rep.y_written = 1;
        break;
      }
    }
    trace.step_ns +=
        std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - start)
            .count();
    if (!is_accelerated(algo)) {
      rep.t = i;
      rep.sample = s;
      it.dense().t = i;
    }
    if (!it.written_finite(rep)) {
      throw StepError("non-finite iterate after step " + std::to_string(i) +
                      " (sample " + std::to_string(s) + ")");
    }
    touched += rep.y_written + rep.z_written;

    const double post =
        loss_at(it.y_margin(loss, s), s, mu > 0.0 ? it.y_squared_norm() : 0.0);
    cumulative += post;
    if (online) {
      cumulative_strict += strict;
      trace.round_loss.push_back(post);
      trace.round_loss_strict.push_back(strict);
    }

    if (diag) {
      track_distance();
      if (online) {
        const OptimizerState snap = it.snapshot();
        mc.R = std::max({mc.R, gradient_norm(snap.y, s), gradient_norm(snap.x, s)});
        if (i == 1 && schedule) {
          const double a = config.alpha;
          const double L2 = schedule->peek(2).L_t;
          mc.G = ((1.0 - a * a) * L2 - a * (1.0 - a) * schedule->current().L) *
                 squared_norm([&] {
                   Vector d(n);
                   for (std::size_t j = 0; j < n; ++j) d[j] = snap.y[j] - snap.z[j];
                   return d;
                 }());
        }
      }
    }
    if (options.record_steps) trace.reports.push_back(rep);
    if (i % K == 0 || i == T) emit(i, post, strict);
  }
  trace.final_y = it.y();

  // Metrics.
  if (online && T > 0 && have_star) {
    std::vector<double> prefix(static_cast<std::size_t>(T) + 1, 0.0);
    for (std::int64_t t = 1; t <= T; ++t) {
      prefix[static_cast<std::size_t>(t)] =
          prefix[static_cast<std::size_t>(t - 1)] +
          loss.value(y_star, trace.rounds[static_cast<std::size_t>(t - 1)]);
      if (diag) {
        mc.R = std::max(mc.R, gradient_norm(y_star,
                                            trace.rounds[static_cast<std::size_t>(t - 1)]));
      }
    }
    trace.comparator_total = prefix.back();
    for (auto& row : trace.rows) {
      const double ref = prefix[static_cast<std::size_t>(row.t)];
      row.metric = row.cumulative_loss - ref;
      row.metric_strict = row.cumulative_strict - ref;
    }
    if (config.prefix_comparator) {
      std::vector<std::int64_t> at;
      for (const auto& row : trace.rows) {
        if (row.t > 0) at.push_back(row.t);
      }
      const auto values = prefix_comparator_values(loss, trace.rounds, at);
      trace.prefix_comparator.assign(1, 0.0);
      trace.prefix_comparator.insert(trace.prefix_comparator.end(),
                                     values.begin(), values.end());
    }
  } else if (!online) {
    for (auto& row : trace.rows) row.metric = row.objective - trace.f_star;
  }
  return trace;
}

}  // namespace arcd
