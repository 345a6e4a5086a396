#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "arcd/core.hpp"
#include "arcd/data.hpp"
#include "arcd/losses.hpp"
#include "arcd/metrics.hpp"
#include "arcd/optimizers.hpp"

namespace arcd {

/// One emitted trace row. `t` counts completed steps (0 = initial state).
struct TraceRow {
  std::int64_t t = 0;
  double loss = 0.0;             // loss charged at step t (post-update)
  double cumulative_loss = 0.0;
  double loss_strict = 0.0;      // online: f_t at the pre-update iterate
  double cumulative_strict = 0.0;
  double objective = 0.0;        // stochastic: f(y) at this row
  double metric = 0.0;           // suboptimality (stochastic) or regret
  double metric_strict = 0.0;    // online: regret of the strict protocol
  std::uint64_t coords_touched = 0;  // cumulative y + z entries written
};

struct RunTrace {
  RunConfig config;
  Setting setting = Setting::Online;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<TraceRow> rows;
  std::vector<std::int64_t> row_wall_ns;  // cumulative step time per row
  std::int64_t step_ns = 0;               // total time inside steps
  Vector final_y;
  double b_used = 1.0;  // schedule constant b after auto resolution

  // Online protocol, one entry per round.
  std::vector<std::size_t> rounds;
  std::vector<double> round_loss;         // f_t(y_t)
  std::vector<double> round_loss_strict;  // f_t(y_{t-1})
  std::vector<double> round_margin;       // <a_t, y_{t-1}>
  bool wrapped = false;  // rounds cycled through the data more than once

  std::vector<StepReport> reports;  // only with config.record_steps

  ComparatorResult comparator;
  double f_star = 0.0;           // comparator objective (stochastic)
  double comparator_total = 0.0; // sum_t f_t(y*) (online)
  MeasuredConstants measured;
  std::vector<double> prefix_comparator;  // per row, with --prefix-comparator

  double final_metric() const { return rows.empty() ? 0.0 : rows.back().metric; }
  double final_metric_strict() const {
    return rows.empty() ? 0.0 : rows.back().metric_strict;
  }
};

struct RunOptions {
  /// Precomputed comparator for this (data, rounds) pair; computed when
  /// absent.
  const ComparatorResult* comparator = nullptr;
  bool record_steps = false;
};

/// Runs `config.algorithm` for `config.horizon` steps on `data`.
RunTrace run(const RunConfig& config, std::shared_ptr<const Dataset> data,
             const RunOptions& options = {});

/// b = sigma0 * sqrt(2 / (3 n D0^2)) with sigma0 the gradient noise at the
/// start point and D0 = |start - y*|; 1 when either estimate vanishes.
double balanced_b(const LossModel& loss, std::span<const double> start,
                  std::span<const double> y_star);

/// Sample index charged at each online round t = 1..T (stream order, cyclic).
std::vector<std::size_t> online_rounds(std::size_t m, std::int64_t horizon);

}  // namespace arcd
