#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "arcd/core.hpp"
#include "arcd/data.hpp"

namespace arcd {

/// Per-sample smooth convex loss l(y, i) on a shared immutable dataset, with
/// an explicit (mu/2)|y|^2 term supplying strong convexity:
///   squared:  (1/2)(<a_i,y> - b_i)^2       + (mu/2)|y|^2
///   logistic: log(1 + exp(-b_i <a_i,y>))   + (mu/2)|y|^2,  b_i in {-1,+1}
class LossModel {
 public:
  LossModel(LossKind kind, std::shared_ptr<const Dataset> data,
            double mu = 0.0);

  LossKind kind() const { return kind_; }
  double mu() const { return mu_; }
  const Dataset& data() const { return *data_; }
  std::shared_ptr<const Dataset> shared_data() const { return data_; }
  std::size_t dim() const { return data_->cols(); }
  std::size_t samples() const { return data_->rows(); }

  /// <a_i, y>.
  double margin(std::span<const double> y, std::size_t i) const {
    return data_->row(i).dot(y);
  }
  /// Data term as a function of the margin (no regularizer).
  double data_loss(double margin, std::size_t i) const;
  /// d(data_loss)/d(margin).
  double data_slope(double margin, std::size_t i) const;

  double value(std::span<const double> y, std::size_t i) const;
  void gradient(std::span<const double> y, std::size_t i,
                std::span<double> out) const;
  Vector gradient(std::span<const double> y, std::size_t i) const;

  /// One entry of the per-sample gradient. Costs one row dot product.
  double partial(std::span<const double> y, std::size_t i,
                 std::size_t k) const;
  /// Same, given a cached margin <a_i, y> and y[k]; O(log nnz).
  double partial_from_margin(double margin, std::size_t i, std::size_t k,
                             double y_k) const;

  /// Smoothness constant L of every per-sample loss (and of their average).
  double smoothness() const;

  /// Uniform average over samples of value(y, i).
  double objective(std::span<const double> y) const;
  Vector objective_gradient(std::span<const double> y) const;

 private:
  LossKind kind_;
  std::shared_ptr<const Dataset> data_;
  double mu_;
};

/// squared: max_i |a_i|^2 + mu;  logistic: max_i |a_i|^2 / 4 + mu.
/// A zero result (all-zero data and mu = 0) is a ConfigError.
double smoothness_constant(LossKind kind, const Dataset& data, double mu);

inline double full_objective(const LossModel& model,
                             std::span<const double> y) {
  return model.objective(y);
}

/// max over probes of max_i |g(x, i) - grad f(x)|, the noise constant of the
/// stochastic analysis. Diagnostics only.
double gradient_noise(const LossModel& model,
                      std::span<const double> x);

}  // namespace arcd
