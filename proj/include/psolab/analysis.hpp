#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "psolab/rng.hpp"
#include "psolab/swarm.hpp"

namespace psolab {

/// Mean squared distance from each particle to the swarm centroid.
double msd_to_centroid(const SwarmState& state);

/// Strictly positive consecutive differences s(t+1) - s(t), in order.
std::vector<double> positive_increments(std::span<const double> series);

inline constexpr double kDefaultBinSize = 0.2;
inline constexpr double kDefaultRangeMin = 0.0;
inline constexpr double kDefaultRangeMax = 25.0;

struct Histogram {
  double bin_size = kDefaultBinSize;
  double range_min = kDefaultRangeMin;
  double range_max = kDefaultRangeMax;
  std::vector<std::uint64_t> counts;
  /// Counts rescaled so the largest maps to 1 and the smallest to 0. When
  /// every count is equal the entries are all 1 (or all 0 for an empty histogram).
  std::vector<double> normalized;

  double bin_low(std::size_t i) const { return range_min + static_cast<double>(i) * bin_size; }
  std::uint64_t total() const;
};

/// ceil((range_max - range_min) / bin_size), tolerant of representation error.
std::size_t bin_count(double bin_size, double range_min, double range_max);

/// Fixed-width histogram over half-open bins [lo, lo + bin_size). Values
/// outside [range_min, range_max) are dropped.
Histogram build_histogram(std::span<const double> values, double bin_size = kDefaultBinSize,
                          double range_min = kDefaultRangeMin,
                          double range_max = kDefaultRangeMax);

/// Counts one value into an existing histogram; false when it falls outside
/// the range. Leaves `normalized` stale.
bool histogram_add(Histogram& histogram, double value);

/// Recomputes `normalized` from `counts`.
void normalize(Histogram& histogram);

struct PowerLawFit {
  double alpha_hat = 0.0;
  double xmin_hat = 0.0;
  std::size_t n_tail = 0;
  /// Kolmogorov-Smirnov distance between the tail and the fitted power law.
  double ks = 0.0;
  /// Fewer than kMinTailSamples samples at or above xmin_hat.
  bool low_confidence = false;
};

inline constexpr std::size_t kMinTailSamples = 50;

/// Continuous power-law MLE with x_min chosen by minimum KS distance.
///
/// Candidate x_min values are the distinct sample values (excluding the
/// largest, so the tail keeps at least two distinct values). Candidates that
/// leave fewer than kMinTailSamples samples in the tail are used only when
/// no other candidate exists, and the fit is then flagged low-confidence.
/// Throws DegenerateSampleError for fewer than two distinct values and
/// DomainError for non-positive or non-finite samples.
PowerLawFit fit_power_law(std::span<const double> samples);

/// Alpha MLE for a fixed cutoff: 1 + n / sum(ln(x / xmin)) over x >= xmin.
double power_law_alpha_mle(std::span<const double> samples, double xmin);

/// KS distance between the samples >= xmin and a continuous power law.
double power_law_ks(std::span<const double> samples, double alpha, double xmin);

/// Shifted exponential p(x) = lambda exp(-lambda (x - xmin)), x >= xmin,
/// fitted by maximum likelihood on the same tail.
struct ExponentialFit {
  double lambda = 0.0;
  double xmin = 0.0;
  std::size_t n_tail = 0;
  double ks = 0.0;
};

ExponentialFit fit_exponential_tail(std::span<const double> samples, double xmin);

enum class PowerLawKind { Continuous, Discrete };

/// Normalized power-law density (continuous) or mass (discrete, integer x).
/// Throws DomainError for x < xmin, alpha <= 1 or xmin <= 0.
double power_law_pdf(double x, double alpha, double xmin, PowerLawKind kind);

/// Hurwitz zeta sum over n >= 0 of (n + q)^-s for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

/// Inverse-CDF draw from a continuous power law.
double sample_power_law(Rng& rng, double alpha, double xmin);

struct AvalancheSeries {
  std::vector<std::uint64_t> sizes;
};

/// One-dimensional slope sandpile with a closed wall on the left and an
/// open edge on the right.
///
/// z[n] = h(n) - h(n+1). A grain dropped at n does z[n] += 1, z[n-1] -= 1.
/// Any z[n] > z_c topples: z[n] -= 2, z[n-1] += 1, z[n+1] += 1; at the right
/// edge the grain leaves the pile, so z[N-1] -= 1, z[N-2] += 1. Each entry of
/// the result is the number of topples caused by one dropped grain.
class Sandpile1D {
 public:
  Sandpile1D(std::size_t n_sites, std::int64_t z_c);

  /// Drops one grain at `site`, relaxes fully, returns the topple count.
  std::uint64_t drop(std::size_t site);

  const std::vector<std::int64_t>& slopes() const noexcept { return z_; }
  /// Grains on the pile, recomputed from the slopes.
  std::int64_t mass() const;
  std::uint64_t grains_added() const noexcept { return added_; }
  std::uint64_t grains_lost() const noexcept { return lost_; }

 private:
  std::vector<std::int64_t> z_;
  std::int64_t z_c_;
  std::uint64_t added_ = 0;
  std::uint64_t lost_ = 0;
  std::vector<std::size_t> unstable_;
};

/// Drives the pile with `warmup` uniformly placed grains (discarded), then
/// `n_grains` more whose avalanche sizes are returned.
AvalancheSeries simulate_sandpile_1d(std::size_t n_sites, std::int64_t z_c, std::size_t n_grains,
                                     Rng& rng, std::size_t warmup = 0);

struct BakSneppenResult {
  AvalancheSeries avalanches;
  /// Self-organized threshold estimate (the gap: largest minimum fitness seen
  /// during warm-up).
  double threshold = 0.0;
  /// Minimum fitness at each measured step.
  std::vector<double> minima;
};

/// Bak-Sneppen ring: each step the least fit species and its two ring
/// neighbours get fresh U[0,1) fitnesses. After `warmup` steps the threshold
/// is frozen; an avalanche is a maximal run of consecutive steps whose minimum
/// fitness lies below it.
BakSneppenResult simulate_bak_sneppen(std::size_t n_species, std::size_t n_steps, Rng& rng,
                                      std::optional<std::size_t> warmup = std::nullopt);

}  // namespace psolab
