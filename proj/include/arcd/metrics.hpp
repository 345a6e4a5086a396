#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "arcd/core.hpp"
#include "arcd/losses.hpp"

namespace arcd {

/// Offline minimizer of sum_t f_t(y) where round t charges sample s_t.
struct ComparatorResult {
  Vector y;
  double gradient_norm = 0.0;  // of the averaged objective at y
  std::int64_t iterations = 0;
  bool min_norm_fallback = false;  // singular normal equations, mu = 0
  std::string method;              // "ldlt", "min-norm", "cg", "gd"
};

inline constexpr double kLogisticTolerance = 1e-8;
inline constexpr std::int64_t kLogisticMaxIterations = 100000;

/// Minimizes sum_i w_i l(y, i) + (mu W / 2)|y|^2, W = sum_i w_i.
/// Squared loss: regularized normal equations via a dense LDLT (conjugate
/// gradients above `kDenseComparatorLimit` features). Logistic: gradient
/// descent with backtracking until |grad| <= 1e-8 or 1e5 iterations.
ComparatorResult comparator(const LossModel& loss,
                            std::span<const double> weights);

/// Comparator for an online sequence of rounds (sample index per round).
ComparatorResult comparator_for_rounds(const LossModel& loss,
                                       std::span<const std::size_t> rounds);

/// Comparator of the uniform average over all samples.
ComparatorResult comparator_full(const LossModel& loss);

inline constexpr std::size_t kDenseComparatorLimit = 2048;

/// Prefix regret R(t) = sum_{s<=t} (loss_s - comparator_loss_s).
std::vector<double> regret_curve(std::span<const double> round_losses,
                                 std::span<const double> comparator_losses);

/// Per-round losses of a fixed vector over the rounds.
std::vector<double> round_losses_at(const LossModel& loss,
                                    std::span<const std::size_t> rounds,
                                    std::span<const double> y);

/// sum_{s<=t} f_s(y*_t) with y*_t minimizing the first t rounds, for each t
/// in `at` (ascending). Auxiliary plotting mode.
std::vector<double> prefix_comparator_values(
    const LossModel& loss, std::span<const std::size_t> rounds,
    std::span<const std::int64_t> at);

/// f(y) - f*.
double suboptimality(const LossModel& loss, std::span<const double> y,
                     double f_star);

struct ClassifierStats {
  double accuracy = 0.0;
  std::size_t mistakes = 0;
  std::size_t rounds = 0;
};

/// Online sign predictions from pre-update margins; a zero margin predicts
/// +1.
ClassifierStats classify_stats(std::span<const double> margins,
                               std::span<const double> labels);

// ---------------------------------------------------------------------------
// Convergence and regret bounds, evaluated with measured constants.
// ---------------------------------------------------------------------------

/// Constants measured during a run.
struct MeasuredConstants {
  double L = 0.0;
  double sigma = 0.0;  // max |g(x,xi) - grad f(x)|
  double D = 0.0;      // max |x* - z_t|
  double R = 0.0;      // max |grad f_t(x)|
  double G = 0.0;      // ((1-a^2) L_2 - a(1-a) L) |y_1 - z_1|^2
};

/// 2 n^2 D^2 L / T^2 + (2 n D^2 b + 4 sigma^2 / (3 b)) / sqrt(T)
double sarcd_general_bound(std::size_t n, double L, double D, double sigma,
                           double b, double T);

/// 2 (n^2 L + mu) D^2 / (T+2)^2 + 2 n sigma^2 / ((T+2) mu) (1 + 2 ln(T+1)/(T+2))
double sarcd_strong_bound(std::size_t n, double L, double mu, double D,
                          double sigma, double T);

/// (2R^2/(aL) + L D^2/2) sqrt(nT) + R^2/((1-a) a L) sqrt(T/n)
///   + ((a+1) L D^2 / (2a) + G/2) sqrt(n)
double oarcd_general_bound(std::size_t n, double L, double alpha, double R,
                           double D, double G, double T);

/// R^2 ln(T+1) / (2 (1-a) a mu) + n R^2 ln(T+1) / (a mu)
///   + D^2 (2 a mu + L) / (2a) + G/2
double oarcd_strong_bound(std::size_t n, double L, double mu, double alpha,
                          double R, double D, double G, double T);

}  // namespace arcd
