#include "arcd/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace arcd {

namespace {

// log(1 + exp(-s)) without overflow.
double softplus_neg(double s) {
  return s > 0.0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
}

double squared_norm(std::span<const double> y) {
  double acc = 0.0;
  for (double v : y) acc += v * v;
  return acc;
}

}  // namespace

LossModel::LossModel(LossKind kind, std::shared_ptr<const Dataset> data,
                     double mu)
    : kind_(kind), data_(std::move(data)), mu_(mu) {
  if (!data_) throw ConfigError("loss model: no dataset");
  if (mu < 0.0 || !std::isfinite(mu)) {
    throw ConfigError("loss model: mu must be finite and >= 0");
  }
  if (kind_ == LossKind::Logistic) {
    const auto labels = data_->labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != 1.0 && labels[i] != -1.0) {
        throw DataError("logistic loss: label of row " +
                        std::to_string(i + 1) + " is not in {-1,+1}");
      }
    }
  }
}

double LossModel::data_loss(double margin, std::size_t i) const {
  const double b = data_->label(i);
  if (kind_ == LossKind::Squared) {
    const double r = margin - b;
    return 0.5 * r * r;
  }
  return softplus_neg(b * margin);
}

double LossModel::data_slope(double margin, std::size_t i) const {
  const double b = data_->label(i);
  if (kind_ == LossKind::Squared) return margin - b;
  // d/dm log(1+exp(-b m)) = -b / (1 + exp(b m))
  const double s = b * margin;
  if (s > 0.0) {
    const double e = std::exp(-s);
    return -b * e / (1.0 + e);
  }
  return -b / (1.0 + std::exp(s));
}

double LossModel::value(std::span<const double> y, std::size_t i) const {
  double v = data_loss(margin(y, i), i);
  if (mu_ > 0.0) v += 0.5 * mu_ * squared_norm(y);
  return v;
}

void LossModel::gradient(std::span<const double> y, std::size_t i,
                         std::span<double> out) const {
  const double slope = data_slope(margin(y, i), i);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = mu_ * y[k];
  const auto r = data_->row(i);
  for (std::size_t j = 0; j < r.nnz(); ++j) out[r.index[j]] += slope * r.value[j];
}

Vector LossModel::gradient(std::span<const double> y, std::size_t i) const {
  Vector out(y.size());
  gradient(y, i, out);
  return out;
}

double LossModel::partial(std::span<const double> y, std::size_t i,
                          std::size_t k) const {
  return partial_from_margin(margin(y, i), i, k, y[k]);
}

double LossModel::partial_from_margin(double margin, std::size_t i,
                                      std::size_t k, double y_k) const {
  const double a = data_->row(i).at(k);
  const double data_part = a == 0.0 ? 0.0 : data_slope(margin, i) * a;
  return data_part + mu_ * y_k;
}

double LossModel::smoothness() const {
  return smoothness_constant(kind_, *data_, mu_);
}

double LossModel::objective(std::span<const double> y) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < samples(); ++i) acc += data_loss(margin(y, i), i);
  acc /= static_cast<double>(samples());
  if (mu_ > 0.0) acc += 0.5 * mu_ * squared_norm(y);
  return acc;
}

Vector LossModel::objective_gradient(std::span<const double> y) const {
  Vector g(y.size(), 0.0);
  for (std::size_t i = 0; i < samples(); ++i) {
    const double slope = data_slope(margin(y, i), i);
    const auto r = data_->row(i);
    for (std::size_t j = 0; j < r.nnz(); ++j) g[r.index[j]] += slope * r.value[j];
  }
  const double inv_m = 1.0 / static_cast<double>(samples());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = g[k] * inv_m + mu_ * y[k];
  return g;
}

double smoothness_constant(LossKind kind, const Dataset& data, double mu) {
  if (data.rows() == 0) throw ConfigError("smoothness: empty dataset");
  double max_sq = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    max_sq = std::max(max_sq, data.row(i).squared_norm());
  }
  const double curvature = kind == LossKind::Squared ? 1.0 : 0.25;
  const double L = curvature * max_sq + mu;
  if (!(L > 0.0)) {
    throw ConfigError("smoothness: all-zero data with mu = 0 has no curvature");
  }
  return L;
}

double gradient_noise(const LossModel& model, std::span<const double> x) {
  const Vector full = model.objective_gradient(x);
  const std::size_t n = x.size();
  // g(x,i) - grad f(x) = slope_i a_i - mean_j(slope_j a_j); the mu terms
  // cancel.
  Vector data_mean(n);
  for (std::size_t k = 0; k < n; ++k) data_mean[k] = full[k] - model.mu() * x[k];
  const double mean_sq = squared_norm(data_mean);
  double worst = 0.0;
  for (std::size_t i = 0; i < model.samples(); ++i) {
    const double slope = model.data_slope(model.margin(x, i), i);
    const auto r = model.data().row(i);
    // |s a - g|^2 = s^2 |a|^2 - 2 s <a, g> + |g|^2
    double cross = 0.0;
    for (std::size_t j = 0; j < r.nnz(); ++j) cross += r.value[j] * data_mean[r.index[j]];
    const double sq = slope * slope * r.squared_norm() - 2.0 * slope * cross + mean_sq;
    worst = std::max(worst, sq);
  }
  return std::sqrt(std::max(worst, 0.0));
}

}  // namespace arcd
