#include "arcd/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace arcd {

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double e : v) acc += e * e;
  return std::sqrt(acc);
}

/// Weighted objective, scaled by 1/W: sum_i (w_i/W) l_i(y) + (mu/2)|y|^2.
struct WeightedObjective {
  const LossModel& loss;
  std::span<const double> weights;
  double total;

  double value(std::span<const double> y) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] == 0.0) continue;
      acc += weights[i] * loss.data_loss(loss.margin(y, i), i);
    }
    acc /= total;
    if (loss.mu() > 0.0) {
      double sq = 0.0;
      for (double v : y) sq += v * v;
      acc += 0.5 * loss.mu() * sq;
    }
    return acc;
  }

  Vector gradient(std::span<const double> y) const {
    Vector g(y.size(), 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] == 0.0) continue;
      const double s = weights[i] * loss.data_slope(loss.margin(y, i), i);
      const auto r = loss.data().row(i);
      for (std::size_t j = 0; j < r.nnz(); ++j) g[r.index[j]] += s * r.value[j];
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
      g[k] = g[k] / total + loss.mu() * y[k];
    }
    return g;
  }

  // (1/W) sum_i w_i a_i a_i^T v + mu v
  Vector hessian_times(std::span<const double> v) const {
    Vector out(v.size(), 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] == 0.0) continue;
      const auto r = loss.data().row(i);
      const double s = weights[i] * r.dot(v);
      for (std::size_t j = 0; j < r.nnz(); ++j) out[r.index[j]] += s * r.value[j];
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = out[k] / total + loss.mu() * v[k];
    }
    return out;
  }
};

ComparatorResult squared_dense(const WeightedObjective& obj) {
  const LossModel& loss = obj.loss;
  const auto n = static_cast<Eigen::Index>(loss.dim());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < obj.weights.size(); ++i) {
    const double w = obj.weights[i];
    if (w == 0.0) continue;
    const auto r = loss.data().row(i);
    const double b = loss.data().label(i);
    for (std::size_t p = 0; p < r.nnz(); ++p) {
      const auto ip = static_cast<Eigen::Index>(r.index[p]);
      rhs(ip) += w * b * r.value[p];
      for (std::size_t q = 0; q <= p; ++q) {
        gram(ip, static_cast<Eigen::Index>(r.index[q])) +=
            w * r.value[p] * r.value[q];
      }
    }
  }
  gram.diagonal().array() += loss.mu() * obj.total;
  gram = gram.selfadjointView<Eigen::Lower>();

  ComparatorResult out;
  Eigen::VectorXd y;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const auto d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.size() ? d.maxCoeff() : 0.0;
  const bool singular = ldlt.info() != Eigen::Success || dmax == 0.0 ||
                        d.minCoeff() <= 1e-12 * dmax;
  if (!singular) {
    y = ldlt.solve(rhs);
    out.method = "ldlt";
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
    cod.setThreshold(1e-12);
    y = cod.solve(rhs);
    out.method = "min-norm";
    out.min_norm_fallback = true;
  }
  out.y.assign(y.data(), y.data() + y.size());
  out.iterations = 1;
  out.gradient_norm = norm2(obj.gradient(out.y));
  return out;
}

ComparatorResult squared_cg(const WeightedObjective& obj) {
  const std::size_t n = obj.loss.dim();
  Vector y(n, 0.0);
  // grad at 0 is -(1/W) sum w b a; solve H y = -grad(0)
  Vector r = obj.gradient(y);
  for (double& v : r) v = -v;
  Vector p = r;
  double rr = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
  const double tol = 1e-10 * (1.0 + std::sqrt(rr));
  ComparatorResult out;
  std::int64_t it = 0;
  for (; it < static_cast<std::int64_t>(10 * n + 100) && std::sqrt(rr) > tol;
       ++it) {
    const Vector hp = obj.hessian_times(p);
    const double php = std::inner_product(p.begin(), p.end(), hp.begin(), 0.0);
    if (!(php > 0.0)) break;
    const double step = rr / php;
    for (std::size_t k = 0; k < n; ++k) {
      y[k] += step * p[k];
      r[k] -= step * hp[k];
    }
    const double rr_next =
        std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    const double ratio = rr_next / rr;
    rr = rr_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + ratio * p[k];
  }
  out.y = std::move(y);
  out.iterations = it;
  out.method = "cg";
  out.gradient_norm = norm2(obj.gradient(out.y));
  return out;
}

ComparatorResult logistic_gd(const WeightedObjective& obj) {
  const std::size_t n = obj.loss.dim();
  Vector y(n, 0.0);
  Vector trial(n);
  double value = obj.value(y);
  Vector g = obj.gradient(y);
  double step = 1.0 / obj.loss.smoothness();
  ComparatorResult out;
  std::int64_t it = 0;
  double gnorm = norm2(g);
  for (; it < kLogisticMaxIterations && gnorm > kLogisticTolerance; ++it) {
    const double gg = gnorm * gnorm;
    step *= 2.0;  // let the step grow back after backtracking
    for (;;) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = y[k] - step * g[k];
      const double next = obj.value(trial);
      if (next <= value - 0.5 * step * gg || step < 1e-300) {
        value = next;
        break;
      }
      step *= 0.5;
    }
    y.swap(trial);
    g = obj.gradient(y);
    gnorm = norm2(g);
  }
  out.y = std::move(y);
  out.iterations = it;
  out.method = "gd";
  out.gradient_norm = gnorm;
  return out;
}

}  // namespace

ComparatorResult comparator(const LossModel& loss,
                            std::span<const double> weights) {
  if (weights.size() != loss.samples()) {
    throw ConfigError("comparator: one weight per sample required");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw ConfigError("comparator: needs at least one round");
  const WeightedObjective obj{loss, weights, total};
  if (loss.kind() == LossKind::Squared) {
    return loss.dim() <= kDenseComparatorLimit ? squared_dense(obj)
                                               : squared_cg(obj);
  }
  return logistic_gd(obj);
}

ComparatorResult comparator_for_rounds(const LossModel& loss,
                                       std::span<const std::size_t> rounds) {
  if (rounds.empty()) throw ConfigError("comparator: T must be >= 1");
  Vector weights(loss.samples(), 0.0);
  for (std::size_t s : rounds) weights.at(s) += 1.0;
  return comparator(loss, weights);
}

ComparatorResult comparator_full(const LossModel& loss) {
  const Vector weights(loss.samples(), 1.0);
  return comparator(loss, weights);
}

std::vector<double> regret_curve(std::span<const double> round_losses,
                                 std::span<const double> comparator_losses) {
  if (round_losses.size() != comparator_losses.size()) {
    throw ConfigError("regret_curve: length mismatch");
  }
  std::vector<double> out(round_losses.size());
  double acc = 0.0;
  double ref = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) {
    acc += round_losses[t];
    ref += comparator_losses[t];
    out[t] = acc - ref;
  }
  return out;
}

std::vector<double> round_losses_at(const LossModel& loss,
                                    std::span<const std::size_t> rounds,
                                    std::span<const double> y) {
  std::vector<double> out(rounds.size());
  for (std::size_t t = 0; t < rounds.size(); ++t) {
    out[t] = loss.value(y, rounds[t]);
  }
  return out;
}

std::vector<double> prefix_comparator_values(
    const LossModel& loss, std::span<const std::size_t> rounds,
    std::span<const std::int64_t> at) {
  std::vector<double> out;
  out.reserve(at.size());
  for (std::int64_t t : at) {
    if (t < 1 || static_cast<std::size_t>(t) > rounds.size()) {
      throw ConfigError("prefix comparator: t out of range");
    }
    const auto prefix = rounds.first(static_cast<std::size_t>(t));
    const auto best = comparator_for_rounds(loss, prefix);
    const auto losses = round_losses_at(loss, prefix, best.y);
    out.push_back(std::accumulate(losses.begin(), losses.end(), 0.0));
  }
  return out;
}

double suboptimality(const LossModel& loss, std::span<const double> y,
                     double f_star) {
  return loss.objective(y) - f_star;
}

ClassifierStats classify_stats(std::span<const double> margins,
                               std::span<const double> labels) {
  if (margins.size() != labels.size()) {
    throw ConfigError("classify_stats: length mismatch");
  }
  ClassifierStats s;
  s.rounds = margins.size();
  for (std::size_t t = 0; t < margins.size(); ++t) {
    const double predicted = margins[t] >= 0.0 ? 1.0 : -1.0;
    const double truth = labels[t] > 0.0 ? 1.0 : -1.0;
    if (predicted != truth) ++s.mistakes;
  }
  s.accuracy = s.rounds == 0
                   ? 0.0
                   : 1.0 - static_cast<double>(s.mistakes) / s.rounds;
  return s;
}

// ---------------------------------------------------------------------------

double sarcd_general_bound(std::size_t n, double L, double D, double sigma,
                           double b, double T) {
  const double nd = static_cast<double>(n);
  return 2.0 * nd * nd * D * D * L / (T * T) +
         (2.0 * nd * D * D * b + 4.0 * sigma * sigma / (3.0 * b)) /
             std::sqrt(T);
}

double sarcd_strong_bound(std::size_t n, double L, double mu, double D,
                          double sigma, double T) {
  const double nd = static_cast<double>(n);
  return 2.0 * (nd * nd * L + mu) * D * D / ((T + 2.0) * (T + 2.0)) +
         2.0 * nd * sigma * sigma / ((T + 2.0) * mu) *
             (1.0 + 2.0 * std::log(T + 1.0) / (T + 2.0));
}

double oarcd_general_bound(std::size_t n, double L, double alpha, double R,
                           double D, double G, double T) {
  const double nd = static_cast<double>(n);
  return (2.0 * R * R / (alpha * L) + L * D * D / 2.0) * std::sqrt(nd * T) +
         R * R / ((1.0 - alpha) * alpha * L) * std::sqrt(T / nd) +
         ((alpha + 1.0) * L * D * D / (2.0 * alpha) + G / 2.0) * std::sqrt(nd);
}

double oarcd_strong_bound(std::size_t n, double L, double mu, double alpha,
                          double R, double D, double G, double T) {
  const double nd = static_cast<double>(n);
  const double lg = std::log(T + 1.0);
  return R * R * lg / (2.0 * (1.0 - alpha) * alpha * mu) +
         nd * R * R * lg / (alpha * mu) +
         D * D / (2.0 * alpha) * (2.0 * alpha * mu + L) + G / 2.0;
}

}  // namespace arcd
