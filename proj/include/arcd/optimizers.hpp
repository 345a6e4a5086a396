#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "arcd/core.hpp"
#include "arcd/losses.hpp"
#include "arcd/schedules.hpp"

namespace arcd {

/// What one step did. `y_written` counts entries where y_t is written away
/// from the extrapolation point x_t; `z_written` counts entries of z touched.
struct StepReport {
  std::int64_t t = 0;
  std::size_t coordinate = 0;
  std::size_t sample = 0;
  double partial = 0.0;
  double alpha_t = 0.0;
  double L_t = 0.0;
  double delta_norm = 0.0;  // |delta_t| = a(n) |partial|
  std::size_t y_written = 0;
  std::size_t z_written = 0;
};

/// The two three-sequence variants differ only in the z-step coefficient:
///   stochastic: a b^2 / (n L_t alpha_t + mu a b)
///   online:     a b^2 alpha_t / (n L_t + a b alpha_t mu)
enum class Flavor { Stochastic, Online };

double z_step_coefficient(const ScheduleParams& p, Flavor flavor);

/// One accelerated coordinate step with the sample and coordinate given.
/// Advances state.t by one. The subproblem
///   argmin_x <a(n) e_k g_k, x - x_t> + (L_t/2)|x - x_t|^2
/// is solved in closed form: only entry k moves, by -(a(n)/L_t) g_k.
StepReport accelerated_coordinate_update(OptimizerState& state,
                                         const ScheduleParams& params,
                                         const LossModel& loss, Flavor flavor,
                                         std::size_t sample,
                                         std::size_t coordinate);

/// SARCD step: draws a sample uniformly and a coordinate uniformly.
StepReport sarcd_step(OptimizerState& state, const ScheduleParams& params,
                      const LossModel& loss, CoordinateSampler& sampler,
                      SampleStream& data_sampler);

/// OARCD round on the revealed loss f_t = l(., sample); the partial is taken
/// at x_t.
StepReport oarcd_step(OptimizerState& state, const ScheduleParams& params,
                      const LossModel& loss, std::size_t sample,
                      CoordinateSampler& sampler);

/// Scaled representation of the iterates for mu = 0. Keeps z explicitly and
/// y - z = beta * u, so a step costs O(nnz(row)) instead of O(n): the blend
/// x_t = z + (1 - alpha_t)(y - z) only rescales beta.
class LazyIterates {
 public:
  LazyIterates(std::span<const double> y, std::span<const double> z,
               std::int64_t t);
  explicit LazyIterates(const OptimizerState& state)
      : LazyIterates(state.y, state.z, state.t) {}

  StepReport step(const ScheduleParams& params, const LossModel& loss,
                  Flavor flavor, std::size_t sample, std::size_t coordinate);

  /// <a_i, y>.
  double y_margin(const LossModel& loss, std::size_t i) const;
  double y_at(std::size_t k) const { return z_[k] + beta_ * u_[k]; }
  double z_at(std::size_t k) const { return z_[k]; }
  std::int64_t t() const { return t_; }
  std::size_t dim() const { return z_.size(); }

  Vector y() const;
  const Vector& z() const { return z_; }
  /// Dense state. x_t equals y_t off the last coordinate, so it is rebuilt
  /// from y and the saved x_t[k] (zero before the first step).
  OptimizerState materialize() const;

 private:
  void rescale(double factor);

  Vector z_;
  Vector u_;
  double beta_ = 1.0;
  std::int64_t t_;
  bool stepped_ = false;
  std::size_t last_coordinate_ = 0;
  double last_x_k_ = 0.0;
};

}  // namespace arcd
