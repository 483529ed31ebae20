#include "psolab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psolab/errors.hpp"

namespace psolab {

double msd_to_centroid(const SwarmState& state) {
  const std::size_t n = state.size();
  if (n < 2) throw ConfigError("MSD needs at least 2 particles");

  std::vector<double> centroid(state.dims(), 0.0);
  for (const auto& p : state.particles)
    for (std::size_t d = 0; d < centroid.size(); ++d) centroid[d] += p.position[d];
  for (double& c : centroid) c /= static_cast<double>(n);

  double sum = 0.0;
  for (const auto& p : state.particles) {
    for (std::size_t d = 0; d < centroid.size(); ++d) {
      const double diff = p.position[d] - centroid[d];
      sum += diff * diff;
    }
  }
  return sum / static_cast<double>(n);
}

std::vector<double> positive_increments(std::span<const double> series) {
  std::vector<double> out;
  for (std::size_t t = 1; t < series.size(); ++t) {
    const double diff = series[t] - series[t - 1];
    if (diff > 0.0) out.push_back(diff);
  }
  return out;
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::size_t bin_count(double bin_size, double range_min, double range_max) {
  if (!(bin_size > 0.0)) throw ConfigError("bin size must be positive");
  if (!(range_max > range_min)) throw ConfigError("histogram range must be non-empty");
  const double ratio = (range_max - range_min) / bin_size;
  // 25 / 0.2 must give 125, not 126.
  return static_cast<std::size_t>(std::ceil(ratio - 1e-9 * ratio));
}

void normalize(Histogram& histogram) {
  const auto& counts = histogram.counts;
  histogram.normalized.assign(counts.size(), 0.0);
  if (counts.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(counts.begin(), counts.end());
  const double lo = static_cast<double>(*lo_it);
  const double hi = static_cast<double>(*hi_it);
  if (hi == lo) {
    std::fill(histogram.normalized.begin(), histogram.normalized.end(), hi > 0.0 ? 1.0 : 0.0);
    return;
  }
  for (std::size_t i = 0; i < counts.size(); ++i)
    histogram.normalized[i] = (static_cast<double>(counts[i]) - lo) / (hi - lo);
}

Histogram build_histogram(std::span<const double> values, double bin_size, double range_min,
                          double range_max) {
  Histogram h;
  h.bin_size = bin_size;
  h.range_min = range_min;
  h.range_max = range_max;
  h.counts.assign(bin_count(bin_size, range_min, range_max), 0);
  for (double v : values) histogram_add(h, v);
  normalize(h);
  return h;
}

bool histogram_add(Histogram& h, double value) {
  if (!(value >= h.range_min) || !(value < h.range_max) || h.counts.empty()) return false;
  auto index = static_cast<std::size_t>(std::floor((value - h.range_min) / h.bin_size));
  index = std::min(index, h.counts.size() - 1);
  ++h.counts[index];
  return true;
}

namespace {

std::vector<double> sorted_positive(std::span<const double> samples) {
  std::vector<double> x(samples.begin(), samples.end());
  for (double v : x)
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("power-law samples must be positive and finite");
  std::sort(x.begin(), x.end());
  return x;
}

// KS distance between sorted tail values and a continuous CDF.
template <typename Cdf>
double ks_sorted(std::span<const double> tail, Cdf cdf) {
  const double m = static_cast<double>(tail.size());
  double worst = 0.0;
  for (std::size_t j = 0; j < tail.size(); ++j) {
    const double f = cdf(tail[j]);
    worst = std::max({worst, std::abs(f - static_cast<double>(j) / m),
                      std::abs(f - static_cast<double>(j + 1) / m)});
  }
  return worst;
}

double power_law_ks_sorted(std::span<const double> tail, double alpha, double xmin) {
  return ks_sorted(tail, [&](double x) { return 1.0 - std::pow(x / xmin, 1.0 - alpha); });
}

}  // namespace

double power_law_alpha_mle(std::span<const double> samples, double xmin) {
  double log_sum = 0.0;
  std::size_t n = 0;
  for (double x : samples) {
    if (x < xmin) continue;
    log_sum += std::log(x / xmin);
    ++n;
  }
  if (n == 0 || log_sum <= 0.0) throw DegenerateSampleError("tail has no spread above x_min");
  return 1.0 + static_cast<double>(n) / log_sum;
}

double power_law_ks(std::span<const double> samples, double alpha, double xmin) {
  std::vector<double> tail;
  for (double x : samples)
    if (x >= xmin) tail.push_back(x);
  std::sort(tail.begin(), tail.end());
  if (tail.empty()) throw DegenerateSampleError("no samples at or above x_min");
  return power_law_ks_sorted(tail, alpha, xmin);
}

PowerLawFit fit_power_law(std::span<const double> samples) {
  const std::vector<double> x = sorted_positive(samples);
  if (x.size() < 2 || x.front() == x.back())
    throw DegenerateSampleError("power-law fit needs at least two distinct sample values");

  const std::size_t n = x.size();
  // suffix_log[i] = sum of ln x[k] for k >= i
  std::vector<double> suffix_log(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix_log[i] = suffix_log[i + 1] + std::log(x[i]);

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == x.back()) break;
    if (i == 0 || x[i] != x[i - 1]) candidates.push_back(i);
  }
  std::vector<std::size_t> confident;
  for (std::size_t i : candidates)
    if (n - i >= kMinTailSamples) confident.push_back(i);
  const bool low_confidence = confident.empty();
  const auto& scan = low_confidence ? candidates : confident;

  std::vector<double> log_x(n);
  for (std::size_t k = 0; k < n; ++k) log_x[k] = std::log(x[k]);

  PowerLawFit best;
  best.ks = std::numeric_limits<double>::infinity();
  for (std::size_t i : scan) {
    const double m = static_cast<double>(n - i);
    const double log_sum = suffix_log[i] - m * log_x[i];
    if (!(log_sum > 0.0)) continue;
    const double alpha = 1.0 + m / log_sum;
    // KS scan; a candidate is dropped as soon as it cannot beat the best.
    double worst = 0.0;
    for (std::size_t j = i; j < n && worst < best.ks; ++j) {
      const double f = 1.0 - std::exp((1.0 - alpha) * (log_x[j] - log_x[i]));
      const double rank = static_cast<double>(j - i);
      worst = std::max({worst, std::abs(f - rank / m), std::abs(f - (rank + 1.0) / m)});
    }
    if (worst < best.ks) {
      best.ks = worst;
      best.alpha_hat = alpha;
      best.xmin_hat = x[i];
      best.n_tail = n - i;
    }
  }
  if (!std::isfinite(best.ks)) throw DegenerateSampleError("no usable x_min candidate");
  best.low_confidence = low_confidence;
  return best;
}

ExponentialFit fit_exponential_tail(std::span<const double> samples, double xmin) {
  std::vector<double> tail;
  for (double x : samples)
    if (x >= xmin) tail.push_back(x);
  std::sort(tail.begin(), tail.end());
  if (tail.empty()) throw DegenerateSampleError("no samples at or above x_min");

  double excess = 0.0;
  for (double x : tail) excess += x - xmin;
  if (!(excess > 0.0)) throw DegenerateSampleError("tail has no spread above x_min");

  ExponentialFit fit;
  fit.xmin = xmin;
  fit.n_tail = tail.size();
  fit.lambda = static_cast<double>(tail.size()) / excess;
  fit.ks = ks_sorted(tail, [&](double x) { return 1.0 - std::exp(-fit.lambda * (x - xmin)); });
  return fit;
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0)) throw DomainError("Hurwitz zeta needs s > 1");
  if (!(q > 0.0)) throw DomainError("Hurwitz zeta needs q > 0");

  // A short direct sum, then Euler-Maclaurin with Bernoulli corrections
  // once the shifted argument is large enough for them to converge fast.
  constexpr double kShift = 12.0;
  static constexpr double kBernoulliOverFactorial[] = {
      1.0 / 12.0,         -1.0 / 720.0,          1.0 / 30240.0,       -1.0 / 1209600.0,
      1.0 / 47900160.0,   -691.0 / 1307674368000.0, 1.0 / 74724249600.0};
  double sum = 0.0;
  double a = q;
  while (a < kShift) {
    sum += std::pow(a, -s);
    a += 1.0;
  }
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  // Rising factorial s (s+1) ... (s+2j-2) times a^(-s-2j+1).
  double factor = s * std::pow(a, -s - 1.0);
  for (std::size_t j = 0; j < std::size(kBernoulliOverFactorial); ++j) {
    sum += kBernoulliOverFactorial[j] * factor;
    const double m = s + 2.0 * static_cast<double>(j);
    factor *= (m + 1.0) * (m + 2.0) / (a * a);
  }
  return sum;
}

double power_law_pdf(double x, double alpha, double xmin, PowerLawKind kind) {
  if (!(alpha > 1.0)) throw DomainError("power law needs alpha > 1");
  if (!(xmin > 0.0)) throw DomainError("power law needs xmin > 0");
  if (x < xmin) throw DomainError("power law is undefined below xmin");
  if (kind == PowerLawKind::Continuous)
    return ((alpha - 1.0) / xmin) * std::pow(x / xmin, -alpha);
  return std::pow(x, -alpha) / hurwitz_zeta(alpha, xmin);
}

double sample_power_law(Rng& rng, double alpha, double xmin) {
  return xmin * std::pow(1.0 - rng.uniform(), -1.0 / (alpha - 1.0));
}

Sandpile1D::Sandpile1D(std::size_t n_sites, std::int64_t z_c) : z_(n_sites, 0), z_c_(z_c) {
  if (n_sites < 2) throw ConfigError("sandpile needs at least 2 sites");
  if (z_c < 1) throw ConfigError("sandpile threshold must be at least 1");
}

std::uint64_t Sandpile1D::drop(std::size_t site) {
  const std::size_t n = z_.size();
  if (site >= n) throw ConfigError("sandpile site out of range");
  ++added_;
  z_[site] += 1;
  if (site > 0) z_[site - 1] -= 1;

  std::uint64_t topples = 0;
  unstable_.clear();
  unstable_.push_back(site);
  while (!unstable_.empty()) {
    const std::size_t s = unstable_.back();
    unstable_.pop_back();
    if (z_[s] <= z_c_) continue;
    ++topples;
    if (s + 1 < n) {
      z_[s] -= 2;
      z_[s + 1] += 1;
      unstable_.push_back(s + 1);
    } else {
      z_[s] -= 1;
      ++lost_;
    }
    if (s > 0) {
      z_[s - 1] += 1;
      unstable_.push_back(s - 1);
    }
    unstable_.push_back(s);
  }
  return topples;
}

std::int64_t Sandpile1D::mass() const {
  std::int64_t total = 0;
  for (std::size_t k = 0; k < z_.size(); ++k) total += static_cast<std::int64_t>(k + 1) * z_[k];
  return total;
}

AvalancheSeries simulate_sandpile_1d(std::size_t n_sites, std::int64_t z_c, std::size_t n_grains,
                                     Rng& rng, std::size_t warmup) {
  Sandpile1D pile(n_sites, z_c);
  for (std::size_t g = 0; g < warmup; ++g) pile.drop(rng.below(n_sites));
  AvalancheSeries series;
  series.sizes.reserve(n_grains);
  for (std::size_t g = 0; g < n_grains; ++g) series.sizes.push_back(pile.drop(rng.below(n_sites)));
  return series;
}

BakSneppenResult simulate_bak_sneppen(std::size_t n_species, std::size_t n_steps, Rng& rng,
                                      std::optional<std::size_t> warmup) {
  if (n_species < 3) throw ConfigError("Bak-Sneppen ring needs at least 3 species");
  const std::size_t warm = warmup.value_or(n_steps / 10);

  std::vector<double> fitness(n_species);
  for (double& f : fitness) f = rng.uniform();

  auto step = [&]() {
    const auto it = std::min_element(fitness.begin(), fitness.end());
    const double lowest = *it;
    const auto i = static_cast<std::size_t>(it - fitness.begin());
    fitness[(i + n_species - 1) % n_species] = rng.uniform();
    fitness[i] = rng.uniform();
    fitness[(i + 1) % n_species] = rng.uniform();
    return lowest;
  };

  BakSneppenResult result;
  double gap = 0.0;
  for (std::size_t t = 0; t < warm; ++t) gap = std::max(gap, step());
  result.threshold = gap;

  result.minima.reserve(n_steps);
  std::uint64_t run = 0;
  for (std::size_t t = 0; t < n_steps; ++t) {
    const double lowest = step();
    result.minima.push_back(lowest);
    if (lowest < result.threshold) {
      ++run;
    } else if (run > 0) {
      result.avalanches.sizes.push_back(run);
      run = 0;
    }
  }
  if (run > 0) result.avalanches.sizes.push_back(run);
  return result;
}

}  // namespace psolab
