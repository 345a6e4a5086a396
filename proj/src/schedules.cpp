#include "arcd/schedules.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace arcd {

std::string_view to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::SarcdGeneral: return "sarcd_general";
    case ScheduleKind::SarcdStrong: return "sarcd_strong";
    case ScheduleKind::OarcdGeneral: return "oarcd_general";
    case ScheduleKind::OarcdStrong: return "oarcd_strong";
  }
  return "?";
}

StepParams sarcd_general_params(std::int64_t t, std::size_t n, double L,
                                double b) {
  if (t < 0) throw ScheduleError("sarcd general schedule: t must be >= 0");
  if (!(L > 0.0) || !(b > 0.0)) {
    throw ConfigError("sarcd general schedule: need L > 0 and b > 0");
  }
  const double td = static_cast<double>(t);
  return {2.0 / (td + 2.0),
          b * std::pow(td + 1.0, kGeneralExponent) + static_cast<double>(n) * L};
}

StrongStepParams sarcd_strong_params(double lambda_prev, std::int64_t t,
                                     std::size_t n, double L, double mu) {
  if (!(mu > 0.0)) throw ConfigError("sarcd strong schedule: need mu > 0");
  if (!(L > 0.0)) throw ConfigError("sarcd strong schedule: need L > 0");
  const double nd = static_cast<double>(n);
  const double a_n = nd;
  if (t == 0) return {1.0, a_n * L + a_n * mu / (nd * nd), 1.0};
  if (t < 0) throw ScheduleError("sarcd strong schedule: t must be >= 0");
  if (!(lambda_prev > 0.0) || lambda_prev > 1.0) {
    throw ScheduleError("sarcd strong schedule: lambda_" +
                        std::to_string(t - 1) + " = " +
                        std::to_string(lambda_prev) +
                        " left (0, 1]; horizon too long for double precision");
  }
  const double half = 0.5 * lambda_prev;
  const double alpha = std::sqrt(lambda_prev + half * half) - half;
  const double L_t = a_n * L + a_n * mu / (nd * nd * lambda_prev);
  const double lambda = lambda_prev * (1.0 - alpha);
  if (!(lambda > std::numeric_limits<double>::min())) {
    throw ScheduleError("sarcd strong schedule: lambda underflow at t = " +
                        std::to_string(t));
  }
  return {alpha, L_t, lambda};
}

StepParams oarcd_general_params(std::int64_t t, double L, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("oarcd schedule: alpha must lie in (0, 1)");
  }
  if (!(L > 0.0)) throw ConfigError("oarcd schedule: need L > 0");
  if (t < 1) throw ScheduleError("oarcd schedule: t must be >= 1");
  return {alpha, alpha * std::sqrt(static_cast<double>(t - 1)) * L + L};
}

StepParams oarcd_strong_params(std::int64_t t, double L, double mu,
                               double alpha) {
  if (!(mu > 0.0)) throw ConfigError("oarcd strong schedule: need mu > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("oarcd schedule: alpha must lie in (0, 1)");
  }
  if (!(L > 0.0)) throw ConfigError("oarcd schedule: need L > 0");
  if (t < 1) throw ScheduleError("oarcd schedule: t must be >= 1");
  return {alpha, alpha * mu * static_cast<double>(t) + L};
}

// ---------------------------------------------------------------------------

ScheduleKind schedule_kind(Setting setting, Regime regime) {
  if (setting == Setting::Stochastic) {
    return regime == Regime::General ? ScheduleKind::SarcdGeneral
                                     : ScheduleKind::SarcdStrong;
  }
  return regime == Regime::General ? ScheduleKind::OarcdGeneral
                                   : ScheduleKind::OarcdStrong;
}

Schedule::Schedule(ScheduleKind kind, std::size_t n, double L, double mu,
                   double b, double alpha)
    : kind_(kind) {
  if (n == 0) throw ConfigError("schedule: dimension must be >= 1");
  if (!(L > 0.0)) throw ConfigError("schedule: need L > 0");
  const double nd = static_cast<double>(n);
  params_.n = n;
  params_.L = L;
  params_.b = b;
  params_.alpha = alpha;
  params_.beta = kGeneralExponent;
  switch (kind) {
    case ScheduleKind::SarcdGeneral:
      if (!(b > 0.0)) throw ConfigError("schedule: need b > 0");
      params_.a_n = nd;
      params_.b_n = 1.0 / nd;
      params_.mu = 0.0;
      break;
    case ScheduleKind::SarcdStrong:
      if (!(mu > 0.0)) throw ConfigError("schedule: strong regime needs mu > 0");
      params_.a_n = nd;
      params_.b_n = 1.0 / nd;
      params_.mu = mu;
      break;
    case ScheduleKind::OarcdGeneral:
      if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("schedule: alpha must lie in (0, 1)");
      }
      params_.a_n = std::sqrt(nd);
      params_.b_n = 1.0;
      params_.mu = 0.0;
      break;
    case ScheduleKind::OarcdStrong:
      if (!(mu > 0.0)) throw ConfigError("schedule: strong regime needs mu > 0");
      if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("schedule: alpha must lie in (0, 1)");
      }
      params_.a_n = nd;
      params_.b_n = 1.0;
      params_.mu = mu;
      break;
  }
  last_t_ = first_step() - 1;
}

std::int64_t Schedule::first_step() const {
  return kind_ == ScheduleKind::SarcdGeneral || kind_ == ScheduleKind::SarcdStrong
             ? 0
             : 1;
}

const ScheduleParams& Schedule::advance(std::int64_t t) {
  if (t != last_t_ + 1) {
    throw ScheduleError("schedule advanced out of order: expected t = " +
                        std::to_string(last_t_ + 1) + ", got " +
                        std::to_string(t));
  }
  switch (kind_) {
    case ScheduleKind::SarcdGeneral: {
      const auto p = sarcd_general_params(t, params_.n, params_.L, params_.b);
      params_.alpha_t = p.alpha_t;
      params_.L_t = p.L_t;
      break;
    }
    case ScheduleKind::SarcdStrong: {
      const auto p = sarcd_strong_params(params_.lambda_t, t, params_.n,
                                         params_.L, params_.mu);
      params_.alpha_t = p.alpha_t;
      params_.L_t = p.L_t;
      params_.lambda_t = p.lambda_t;
      break;
    }
    case ScheduleKind::OarcdGeneral: {
      const auto p = oarcd_general_params(t, params_.L, params_.alpha);
      params_.alpha_t = p.alpha_t;
      params_.L_t = p.L_t;
      break;
    }
    case ScheduleKind::OarcdStrong: {
      const auto p =
          oarcd_strong_params(t, params_.L, params_.mu, params_.alpha);
      params_.alpha_t = p.alpha_t;
      params_.L_t = p.L_t;
      break;
    }
  }
  last_t_ = t;
  return params_;
}

ScheduleParams Schedule::peek(std::int64_t t) const {
  Schedule copy(kind_, params_.n, params_.L, params_.mu, params_.b,
                params_.alpha);
  for (std::int64_t s = copy.first_step(); s < t; ++s) copy.advance(s);
  return copy.advance(t);
}

}  // namespace arcd
