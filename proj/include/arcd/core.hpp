#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arcd {

using Vector = std::vector<double>;

// Error hierarchy. Every module throws one of these; the CLI maps them to a
// nonzero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

class StepError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t& state);

/// Sub-seed for an independent stream. Streams derived from the same master
/// seed never share state, so e.g. changing the coordinate count leaves the
/// sample order untouched.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

namespace stream {
inline constexpr std::uint64_t kCoordinate = 0x636f6f7264ULL;
inline constexpr std::uint64_t kData = 0x64617461ULL;
inline constexpr std::uint64_t kSynth = 0x73796e7468ULL;
}  // namespace stream

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Unbiased draw from {0, ..., n-1} (rejection on the low residue class).
  std::size_t uniform_index(std::size_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal via Box-Muller; fixed across platforms, unlike
  /// std::normal_distribution.
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniform coordinate picker, i.e. the single nonzero of the random diagonal
/// selection matrix.
class CoordinateSampler {
 public:
  CoordinateSampler(std::size_t n, std::uint64_t seed);

  std::size_t draw();

  std::size_t dim() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t draw_count() const { return draws_; }

 private:
  std::size_t n_;
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  Rng rng_;
};

enum class SampleMode { Uniform, Sequential };

/// Sample index stream over m rows: i.i.d. uniform with replacement, or
/// stream order (cyclic once exhausted).
class SampleStream {
 public:
  SampleStream(std::size_t m, SampleMode mode, std::uint64_t seed);

  std::size_t next();

  bool wrapped() const { return wrapped_; }
  SampleMode mode() const { return mode_; }

 private:
  std::size_t m_;
  SampleMode mode_;
  std::size_t cursor_ = 0;
  bool wrapped_ = false;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Iterates
// ---------------------------------------------------------------------------

/// Step-index convention: the stochastic method starts at t = -1 and its
/// first step is t = 0; the online method starts at t = 0 with first round
/// t = 1.
enum class Convention { Stochastic, Online };

struct OptimizerState {
  Vector x;  // extrapolation point of the latest step (zero before any step)
  Vector y;  // primary iterate
  Vector z;  // momentum iterate
  std::int64_t t = -1;

  std::size_t dim() const { return y.size(); }
  bool finite() const;
};

OptimizerState init_state(std::size_t n, Convention convention,
                          std::span<const double> start = {});

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class Algorithm { Sarcd, Oarcd, Sgd, Ogd, Orbcd, Sage };
enum class Regime { General, Strong };
enum class LossKind { Squared, Logistic };
enum class Setting { Stochastic, Online };

std::string_view to_string(Algorithm a);
std::string_view to_string(Regime r);
std::string_view to_string(LossKind k);
std::string_view to_string(Setting s);
std::string_view to_string(SampleMode m);
Algorithm parse_algorithm(std::string_view s);
Regime parse_regime(std::string_view s);
LossKind parse_loss(std::string_view s);
Setting parse_setting(std::string_view s);

struct RunConfig {
  Algorithm algorithm = Algorithm::Oarcd;
  Regime regime = Regime::General;
  std::int64_t horizon = 1000;
  std::uint64_t seed = 1;
  LossKind loss = LossKind::Squared;
  double mu = 0.0;
  double b = 1.0;          // free constant of the general stochastic schedule
  /// Derive b from start-point estimates of sigma and D (needs diagnostics).
  bool auto_b = false;
  double alpha = 0.5;      // constant blend of the online schedules
  double eta_c = 1.0;      // c in the c/sqrt(t) baseline step rule
  std::string dataset;     // provenance only; data is passed separately
  std::int64_t emit_every = 0;  // 0: max(1, T/1000)
  bool lazy = false;
  bool diagnostics = false;
  bool prefix_comparator = false;
  Setting sage_setting = Setting::Online;

  /// Stochastic or online protocol implied by the algorithm.
  Setting setting() const;
  SampleMode sample_mode() const;
  /// mu as seen by the losses: forced to 0 in the general regime.
  double effective_mu() const;
  std::int64_t emit_cadence() const;
  void validate() const;
};

}  // namespace arcd
