#pragma once

// Shared body of the accelerated three-sequence update, used by the
// coordinate steppers and by the full-gradient (SAGE-style) baseline so the
// two agree bit-for-bit when n = 1.

#include <cstddef>
#include <span>

#include "arcd/core.hpp"
#include "arcd/optimizers.hpp"
#include "arcd/schedules.hpp"

namespace arcd::detail {

/// x = (1 - alpha) y + alpha z.
inline void blend(OptimizerState& s, double alpha) {
  const double keep = 1.0 - alpha;
  for (std::size_t j = 0; j < s.y.size(); ++j) {
    s.x[j] = keep * s.y[j] + alpha * s.z[j];
  }
}

/// Given x already blended: y = x - (a/L_t) g on `coords`, then
///   z -= c [ (n L_t / (a b)) (x - y) + (mu / b) (z - x) ].
/// Returns the number of z entries written.
inline std::size_t descend(OptimizerState& s, const ScheduleParams& p,
                           Flavor flavor, std::span<const std::size_t> coords,
                           std::span<const double> grads) {
  const double step = p.a_n / p.L_t;
  s.y = s.x;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    s.y[coords[j]] = s.x[coords[j]] - step * grads[j];
  }
  const double c = z_step_coefficient(p, flavor);
  const double nd = static_cast<double>(p.n);
  const double stiff = nd * p.L_t / (p.a_n * p.b_n);
  if (p.mu == 0.0) {
    for (std::size_t k : coords) {
      s.z[k] -= c * (stiff * (s.x[k] - s.y[k]));
    }
    return coords.size();
  }
  const double pull = p.mu / p.b_n;
  for (std::size_t j = 0; j < s.z.size(); ++j) {
    s.z[j] -= c * (stiff * (s.x[j] - s.y[j]) + pull * (s.z[j] - s.x[j]));
  }
  return s.z.size();
}

}  // namespace arcd::detail
