#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "arcd/core.hpp"
#include "arcd/losses.hpp"
#include "arcd/optimizers.hpp"
#include "arcd/schedules.hpp"

namespace arcd {

// Reference methods for comparisons. Gradient descent and randomized block
// coordinate descent (blocks of one coordinate) serve both protocols. The
// full-gradient accelerated method reuses the coordinate steppers with every
// coordinate selected.

enum class StepRule { InverseSqrt, InverseLinear };

/// eta_t = c / sqrt(t) (general) or 1 / (mu t) (strong); t >= 1.
struct BaselineConfig {
  StepRule rule = StepRule::InverseSqrt;
  double c = 1.0;
  double mu = 0.0;

  double eta(std::int64_t t) const;
  void validate() const;
};

BaselineConfig baseline_config(Regime regime, double c, double mu);

/// y -= eta_t grad f_t(y). Returns the number of entries written (n).
std::size_t ogd_step(std::span<double> y, const LossModel& loss,
                     std::size_t sample, const BaselineConfig& rule,
                     std::int64_t t);

/// Same update on a stochastic sample.
std::size_t sgd_step(std::span<double> y, const LossModel& loss,
                     std::size_t sample, const BaselineConfig& rule,
                     std::int64_t t);

/// y[k] -= eta_t n d f_t(y)/dy[k]. The factor n makes the expected update a
/// full gradient step.
double orbcd_update(std::span<double> y, const LossModel& loss,
                    std::size_t sample, std::size_t coordinate,
                    const BaselineConfig& rule, std::int64_t t);

double orbcd_step(std::span<double> y, const LossModel& loss,
                  std::size_t sample, CoordinateSampler& sampler,
                  const BaselineConfig& rule, std::int64_t t);

/// Full-gradient accelerated step: the three-sequence update with every
/// coordinate selected and n treated as 1 (a(n) = b(n) = 1). `params` must
/// come from a Schedule built with n = 1.
StepReport sage_step(OptimizerState& state, const ScheduleParams& params,
                     const LossModel& loss, Flavor flavor, std::size_t sample);

}  // namespace arcd
