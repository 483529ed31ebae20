#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace psolab {

/// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Portable random stream built on std::mt19937_64.
///
/// The engine output sequence is fixed by the standard, but the standard
/// distributions are not, so the conversions to doubles live here. Same seed
/// gives the same values on every conforming platform (normal() additionally
/// relies on libm's log/sqrt/cos).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller; caches the second variate.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Stream `index` derived from `seed`; distinct indices give unrelated streams.
Rng substream(std::uint64_t seed, std::uint64_t index);

/// One independent stream per particle, so adding particles never perturbs
/// the draws of existing ones.
class SwarmRng {
 public:
  SwarmRng() = default;
  SwarmRng(std::uint64_t seed, std::size_t n_particles);

  Rng& particle(std::size_t i) { return streams_.at(i); }
  std::size_t size() const noexcept { return streams_.size(); }

 private:
  std::vector<Rng> streams_;
};

}  // namespace psolab
