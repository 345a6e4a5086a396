#pragma once

#include <cstddef>
#include <cstdint>

#include "arcd/core.hpp"

namespace arcd {

/// The (alpha_t, L_t) sequences that drive the accelerated coordinate
/// methods, one family per (stochastic|online) x (general|strong) setting.
enum class ScheduleKind { SarcdGeneral, SarcdStrong, OarcdGeneral, OarcdStrong };

std::string_view to_string(ScheduleKind k);

/// Per-step schedule output plus the constants it was built from.
struct ScheduleParams {
  double alpha_t = 1.0;
  double L_t = 1.0;
  double lambda_t = 1.0;  // strong stochastic recursion state, else 1
  double a_n = 1.0;       // coordinate scaling a(n)
  double b_n = 1.0;       // constant b(n)
  double mu = 0.0;
  double L = 1.0;
  double b = 1.0;
  double beta = 1.5;
  double alpha = 0.5;
  std::size_t n = 1;
};

struct StepParams {
  double alpha_t;
  double L_t;
};

struct StrongStepParams {
  double alpha_t;
  double L_t;
  double lambda_t;
};

inline constexpr double kGeneralExponent = 1.5;

/// alpha_t = 2/(t+2), L_t = b (t+1)^{3/2} + n L, for t >= 0.
StepParams sarcd_general_params(std::int64_t t, std::size_t n, double L,
                                double b);

/// t = 0: (1, nL + n mu / n^2, 1). For t >= 1, from lambda_{t-1}:
///   alpha_t  = sqrt(lambda + lambda^2/4) - lambda/2
///   L_t      = nL + n mu / (n^2 lambda)
///   lambda_t = lambda (1 - alpha_t)
/// Throws ScheduleError if lambda underflows.
StrongStepParams sarcd_strong_params(double lambda_prev, std::int64_t t,
                                     std::size_t n, double L, double mu);

/// alpha_t = alpha, L_t = alpha sqrt(t-1) L + L, for t >= 1.
StepParams oarcd_general_params(std::int64_t t, double L, double alpha);

/// alpha_t = alpha, L_t = alpha mu t + L, for t >= 1.
StepParams oarcd_strong_params(std::int64_t t, double L, double mu,
                               double alpha);

/// Stateful schedule owned by one run. `advance(t)` must be called with
/// consecutive step indices starting at the convention's first step.
class Schedule {
 public:
  Schedule(ScheduleKind kind, std::size_t n, double L, double mu = 0.0,
           double b = 1.0, double alpha = 0.5);

  const ScheduleParams& advance(std::int64_t t);
  const ScheduleParams& current() const { return params_; }
  ScheduleKind kind() const { return kind_; }
  std::int64_t first_step() const;

  /// Params at step t without touching the recursion (replays it for the
  /// strong stochastic kind).
  ScheduleParams peek(std::int64_t t) const;

 private:
  ScheduleKind kind_;
  ScheduleParams params_;
  std::int64_t last_t_;
};

ScheduleKind schedule_kind(Setting setting, Regime regime);

}  // namespace arcd
