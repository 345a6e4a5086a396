#include "arcd/optimizers.hpp"

#include <cmath>
#include <string>

#include "three_sequence.hpp"

namespace arcd {

double z_step_coefficient(const ScheduleParams& p, Flavor flavor) {
  const double nd = static_cast<double>(p.n);
  const double ab = p.a_n * p.b_n;
  if (flavor == Flavor::Stochastic) {
    return p.a_n * p.b_n * p.b_n / (nd * p.L_t * p.alpha_t + p.mu * ab);
  }
  return p.a_n * p.b_n * p.b_n * p.alpha_t /
         (nd * p.L_t + ab * p.alpha_t * p.mu);
}

namespace {

void check_step_inputs(const OptimizerState& state, const ScheduleParams& p,
                       const LossModel& loss, std::size_t sample,
                       std::size_t coordinate) {
  if (state.dim() != loss.dim() || state.z.size() != loss.dim() ||
      state.x.size() != loss.dim()) {
    throw ConfigError("step: state dimension " +
                      std::to_string(state.dim()) +
                      " does not match the loss dimension " +
                      std::to_string(loss.dim()));
  }
  if (p.n != loss.dim()) {
    throw ConfigError("step: schedule built for n = " + std::to_string(p.n) +
                      ", data has n = " + std::to_string(loss.dim()));
  }
  if (sample >= loss.samples() || coordinate >= loss.dim()) {
    throw ConfigError("step: sample or coordinate out of range");
  }
}

[[noreturn]] void non_finite(std::int64_t t, std::size_t sample,
                             std::size_t coordinate, double value) {
  throw StepError("non-finite partial derivative " + std::to_string(value) +
                  " at t = " + std::to_string(t) + " (sample " +
                  std::to_string(sample) + ", coordinate " +
                  std::to_string(coordinate) + ")");
}

}  // namespace

StepReport accelerated_coordinate_update(OptimizerState& state,
                                         const ScheduleParams& params,
                                         const LossModel& loss, Flavor flavor,
                                         std::size_t sample,
                                         std::size_t coordinate) {
  check_step_inputs(state, params, loss, sample, coordinate);
  const std::int64_t t = state.t + 1;
  detail::blend(state, params.alpha_t);
  const double g = loss.partial(state.x, sample, coordinate);
  if (!std::isfinite(g)) non_finite(t, sample, coordinate, g);

  const std::size_t coords[] = {coordinate};
  const double grads[] = {g};
  StepReport report;
  report.z_written = detail::descend(state, params, flavor, coords, grads);
  state.t = t;

  report.t = t;
  report.coordinate = coordinate;
  report.sample = sample;
  report.partial = g;
  report.alpha_t = params.alpha_t;
  report.L_t = params.L_t;
  report.delta_norm = params.a_n * std::abs(g);
  report.y_written = 1;
  return report;
}

StepReport sarcd_step(OptimizerState& state, const ScheduleParams& params,
                      const LossModel& loss, CoordinateSampler& sampler,
                      SampleStream& data_sampler) {
  const std::size_t sample = data_sampler.next();
  const std::size_t coordinate = sampler.draw();
  return accelerated_coordinate_update(state, params, loss, Flavor::Stochastic,
                                       sample, coordinate);
}

StepReport oarcd_step(OptimizerState& state, const ScheduleParams& params,
                      const LossModel& loss, std::size_t sample,
                      CoordinateSampler& sampler) {
  const std::size_t coordinate = sampler.draw();
  return accelerated_coordinate_update(state, params, loss, Flavor::Online,
                                       sample, coordinate);
}

// ---------------------------------------------------------------------------
// Lazy representation
// ---------------------------------------------------------------------------

namespace {
// Fold beta into u before it leaves the normal range.
constexpr double kRescaleBelow = 1e-120;
}  // namespace

LazyIterates::LazyIterates(std::span<const double> y,
                           std::span<const double> z, std::int64_t t)
    : z_(z.begin(), z.end()), u_(y.size()), t_(t) {
  if (y.size() != z.size() || y.empty()) {
    throw ConfigError("lazy iterates: y and z must have equal nonzero size");
  }
  for (std::size_t j = 0; j < y.size(); ++j) u_[j] = y[j] - z[j];
}

void LazyIterates::rescale(double factor) {
  for (double& v : u_) v *= factor;
  beta_ = 1.0;
}

double LazyIterates::y_margin(const LossModel& loss, std::size_t i) const {
  const auto r = loss.data().row(i);
  return r.dot(z_) + beta_ * r.dot(u_);
}

StepReport LazyIterates::step(const ScheduleParams& params,
                              const LossModel& loss, Flavor flavor,
                              std::size_t sample, std::size_t coordinate) {
  if (params.mu != 0.0 || loss.mu() != 0.0) {
    throw ConfigError("lazy iterates require mu = 0");
  }
  if (params.n != dim() || loss.dim() != dim() || sample >= loss.samples() ||
      coordinate >= dim()) {
    throw ConfigError("lazy step: dimension or index mismatch");
  }
  const std::int64_t t = t_ + 1;
  const double keep = 1.0 - params.alpha_t;

  // x_t = z + keep * beta * u
  const auto r = loss.data().row(sample);
  const double margin = r.dot(z_) + keep * beta_ * r.dot(u_);
  const std::size_t k = coordinate;
  const double x_k = z_[k] + keep * beta_ * u_[k];
  const double g = loss.partial_from_margin(margin, sample, k, x_k);
  if (!std::isfinite(g)) non_finite(t, sample, k, g);

  const double y_k = x_k - (params.a_n / params.L_t) * g;
  const double c = z_step_coefficient(params, flavor);
  const double stiff =
      static_cast<double>(params.n) * params.L_t / (params.a_n * params.b_n);
  z_[k] -= c * (stiff * (x_k - y_k));

  // y - z for every other coordinate scales by `keep`.
  double next_beta = beta_ * keep;
  if (!(next_beta >= kRescaleBelow)) {
    rescale(next_beta);
    next_beta = 1.0;
  }
  beta_ = next_beta;
  u_[k] = (y_k - z_[k]) / beta_;

  t_ = t;
  stepped_ = true;
  last_coordinate_ = k;
  last_x_k_ = x_k;

  StepReport report;
  report.t = t;
  report.coordinate = k;
  report.sample = sample;
  report.partial = g;
  report.alpha_t = params.alpha_t;
  report.L_t = params.L_t;
  report.delta_norm = params.a_n * std::abs(g);
  report.y_written = 1;
  report.z_written = 1;
  return report;
}

Vector LazyIterates::y() const {
  Vector out(dim());
  for (std::size_t j = 0; j < dim(); ++j) out[j] = y_at(j);
  return out;
}

OptimizerState LazyIterates::materialize() const {
  OptimizerState s;
  s.y = y();
  s.z = z_;
  s.t = t_;
  if (stepped_) {
    s.x = s.y;
    s.x[last_coordinate_] = last_x_k_;
  } else {
    s.x.assign(dim(), 0.0);
  }
  return s;
}

}  // namespace arcd
