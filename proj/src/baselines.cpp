#include "arcd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "three_sequence.hpp"

namespace arcd {

double BaselineConfig::eta(std::int64_t t) const {
  if (t < 1) throw ScheduleError("baseline step rule: t must be >= 1");
  const double td = static_cast<double>(t);
  return rule == StepRule::InverseLinear ? 1.0 / (mu * td) : c / std::sqrt(td);
}

void BaselineConfig::validate() const {
  if (!(c > 0.0)) throw ConfigError("baseline: c must be > 0");
  if (rule == StepRule::InverseLinear && !(mu > 0.0)) {
    throw ConfigError("baseline: the 1/(mu t) rule requires mu > 0");
  }
}

BaselineConfig baseline_config(Regime regime, double c, double mu) {
  BaselineConfig cfg;
  cfg.rule = regime == Regime::Strong ? StepRule::InverseLinear
                                      : StepRule::InverseSqrt;
  cfg.c = c;
  cfg.mu = mu;
  cfg.validate();
  return cfg;
}

namespace {

[[noreturn]] void non_finite_gradient(std::int64_t t, std::size_t sample) {
  throw StepError("non-finite gradient at t = " + std::to_string(t) +
                  " (sample " + std::to_string(sample) + ")");
}

}  // namespace

std::size_t ogd_step(std::span<double> y, const LossModel& loss,
                     std::size_t sample, const BaselineConfig& rule,
                     std::int64_t t) {
  const Vector g = loss.gradient(y, sample);
  if (!std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); })) {
    non_finite_gradient(t, sample);
  }
  const double eta = rule.eta(t);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] -= eta * g[k];
  return y.size();
}

std::size_t sgd_step(std::span<double> y, const LossModel& loss,
                     std::size_t sample, const BaselineConfig& rule,
                     std::int64_t t) {
  return ogd_step(y, loss, sample, rule, t);
}

double orbcd_update(std::span<double> y, const LossModel& loss,
                    std::size_t sample, std::size_t coordinate,
                    const BaselineConfig& rule, std::int64_t t) {
  const double g = loss.partial(y, sample, coordinate);
  if (!std::isfinite(g)) non_finite_gradient(t, sample);
  y[coordinate] -= rule.eta(t) * static_cast<double>(y.size()) * g;
  return g;
}

double orbcd_step(std::span<double> y, const LossModel& loss,
                  std::size_t sample, CoordinateSampler& sampler,
                  const BaselineConfig& rule, std::int64_t t) {
  return orbcd_update(y, loss, sample, sampler.draw(), rule, t);
}

StepReport sage_step(OptimizerState& state, const ScheduleParams& params,
                     const LossModel& loss, Flavor flavor, std::size_t sample) {
  if (params.n != 1 || params.a_n != 1.0 || params.b_n != 1.0) {
    throw ConfigError("sage_step: schedule must be built with n = 1");
  }
  if (state.dim() != loss.dim()) {
    throw ConfigError("sage_step: state/loss dimension mismatch");
  }
  const std::int64_t t = state.t + 1;
  detail::blend(state, params.alpha_t);
  const Vector g = loss.gradient(state.x, sample);
  double sq = 0.0;
  for (double v : g) {
    if (!std::isfinite(v)) non_finite_gradient(t, sample);
    sq += v * v;
  }
  std::vector<std::size_t> coords(state.dim());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  StepReport report;
  report.z_written = detail::descend(state, params, flavor, coords, g);
  state.t = t;
  report.t = t;
  report.sample = sample;
  report.alpha_t = params.alpha_t;
  report.L_t = params.L_t;
  report.partial = state.dim() == 1 ? g[0] : std::sqrt(sq);
  report.delta_norm = std::sqrt(sq);
  report.y_written = state.dim();
  return report;
}

}  // namespace arcd
