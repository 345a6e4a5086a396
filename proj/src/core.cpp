#include "arcd/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace arcd {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (stream * 0xd1342543de82ef95ULL);
  splitmix64(state);
  return splitmix64(state);
}

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::size_t Rng::uniform_index(std::size_t n) {
  const std::uint64_t bound = n;
  // 2^64 mod n; draws below it would bias the low residues.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return static_cast<std::size_t>(r % bound);
  }
}

double Rng::uniform01() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

CoordinateSampler::CoordinateSampler(std::size_t n, std::uint64_t seed)
    : n_(n), seed_(seed), rng_(seed) {
  if (n == 0) throw ConfigError("coordinate sampler: dimension must be >= 1");
}

std::size_t CoordinateSampler::draw() {
  ++draws_;
  if (n_ == 1) return 0;
  return rng_.uniform_index(n_);
}

SampleStream::SampleStream(std::size_t m, SampleMode mode, std::uint64_t seed)
    : m_(m), mode_(mode), rng_(seed) {
  if (m == 0) throw DataError("sample stream: dataset has no rows");
}

std::size_t SampleStream::next() {
  if (mode_ == SampleMode::Uniform) return rng_.uniform_index(m_);
  if (cursor_ == m_) {
    cursor_ = 0;
    wrapped_ = true;
  }
  return cursor_++;
}

bool OptimizerState::finite() const {
  auto ok = [](const Vector& v) {
    return std::all_of(v.begin(), v.end(),
                       [](double e) { return std::isfinite(e); });
  };
  return ok(x) && ok(y) && ok(z);
}

OptimizerState init_state(std::size_t n, Convention convention,
                          std::span<const double> start) {
  if (n == 0) throw ConfigError("init_state: dimension must be >= 1");
  if (!start.empty() && start.size() != n) {
    throw ConfigError("init_state: start vector has dimension " +
                      std::to_string(start.size()) + ", expected " +
                      std::to_string(n));
  }
  OptimizerState state;
  state.x.assign(n, 0.0);
  if (start.empty()) {
    state.y.assign(n, 0.0);
  } else {
    state.y.assign(start.begin(), start.end());
  }
  state.z = state.y;
  state.t = convention == Convention::Stochastic ? -1 : 0;
  return state;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Sarcd: return "sarcd";
    case Algorithm::Oarcd: return "oarcd";
    case Algorithm::Sgd: return "sgd";
    case Algorithm::Ogd: return "ogd";
    case Algorithm::Orbcd: return "orbcd";
    case Algorithm::Sage: return "sage";
  }
  return "?";
}

std::string_view to_string(Regime r) {
  return r == Regime::General ? "general" : "strong";
}

std::string_view to_string(LossKind k) {
  return k == LossKind::Squared ? "squared" : "logistic";
}

std::string_view to_string(Setting s) {
  return s == Setting::Stochastic ? "stochastic" : "online";
}

std::string_view to_string(SampleMode m) {
  return m == SampleMode::Uniform ? "uniform" : "sequential";
}

Algorithm parse_algorithm(std::string_view s) {
  for (auto a : {Algorithm::Sarcd, Algorithm::Oarcd, Algorithm::Sgd,
                 Algorithm::Ogd, Algorithm::Orbcd, Algorithm::Sage}) {
    if (to_string(a) == s) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

Regime parse_regime(std::string_view s) {
  if (s == "general") return Regime::General;
  if (s == "strong") return Regime::Strong;
  throw ConfigError("unknown regime '" + std::string(s) + "'");
}

LossKind parse_loss(std::string_view s) {
  if (s == "squared") return LossKind::Squared;
  if (s == "logistic") return LossKind::Logistic;
  throw ConfigError("unknown loss '" + std::string(s) + "'");
}

Setting parse_setting(std::string_view s) {
  if (s == "stochastic") return Setting::Stochastic;
  if (s == "online") return Setting::Online;
  throw ConfigError("unknown setting '" + std::string(s) + "'");
}

Setting RunConfig::setting() const {
  switch (algorithm) {
    case Algorithm::Sarcd:
    case Algorithm::Sgd:
      return Setting::Stochastic;
    case Algorithm::Oarcd:
    case Algorithm::Ogd:
    case Algorithm::Orbcd:
      return Setting::Online;
    case Algorithm::Sage:
      return sage_setting;
  }
  return Setting::Online;
}

SampleMode RunConfig::sample_mode() const {
  return setting() == Setting::Stochastic ? SampleMode::Uniform
                                          : SampleMode::Sequential;
}

double RunConfig::effective_mu() const {
  return regime == Regime::General ? 0.0 : mu;
}

std::int64_t RunConfig::emit_cadence() const {
  if (emit_every > 0) return emit_every;
  return std::max<std::int64_t>(1, horizon / 1000);
}

void RunConfig::validate() const {
  if (horizon < 0) throw ConfigError("horizon T must be >= 0");
  if (regime == Regime::Strong && !(mu > 0.0)) {
    throw ConfigError("strong regime requires mu > 0");
  }
  if (!(b > 0.0)) throw ConfigError("schedule constant b must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
  if (!(eta_c > 0.0)) throw ConfigError("eta-c must be > 0");
  if (mu < 0.0) throw ConfigError("mu must be >= 0");
  if (lazy && effective_mu() > 0.0) {
    throw ConfigError("the lazy representation requires mu = 0");
  }
}

}  // namespace arcd
