#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "psolab/analysis.hpp"
#include "psolab/errors.hpp"
#include "psolab/rng.hpp"

using namespace psolab;

namespace {

SwarmState at(std::vector<std::vector<double>> positions) {
  SwarmState s;
  for (auto& p : positions) {
    Particle q;
    q.position = std::move(p);
    q.velocity.assign(q.position.size(), 0.0);
    s.particles.push_back(std::move(q));
  }
  s.global_best_position = s.particles.front().position;
  return s;
}

std::vector<double> power_law_sample(std::uint64_t seed, double alpha, double xmin, std::size_t n) {
  Rng rng(seed);
  std::vector<double> out(n);
  // Independent of sample_power_law: inverse CDF written out here.
  for (auto& x : out) x = xmin * std::pow(1.0 - rng.uniform(), -1.0 / (alpha - 1.0));
  return out;
}

}  // namespace

TEST_CASE("msd to centroid") {
  CHECK(msd_to_centroid(at({{1, 0}, {-1, 0}})) == doctest::Approx(1.0));
  CHECK(msd_to_centroid(at({{0, 0}, {3, 0}, {0, 3}})) == doctest::Approx(4.0));
  CHECK(msd_to_centroid(at({{5, 5}, {5, 5}})) == 0.0);

  // Translation invariance.
  Rng rng(2);
  std::vector<std::vector<double>> pts(7, std::vector<double>(4));
  for (auto& p : pts)
    for (auto& x : p) x = rng.uniform() * 10 - 5;
  const double base = msd_to_centroid(at(pts));
  for (auto& p : pts)
    for (auto& x : p) x += 123.0;
  CHECK(msd_to_centroid(at(pts)) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("positive increments") {
  const std::vector<double> s{1, 2, 1.5, 4};
  const auto inc = positive_increments(s);
  REQUIRE(inc.size() == 2);
  CHECK(inc[0] == 1.0);
  CHECK(inc[1] == 2.5);
  CHECK(positive_increments(std::vector<double>{}).empty());
  CHECK(positive_increments(std::vector<double>{3, 3, 2}).empty());
}

TEST_CASE("histogram binning") {
  const std::vector<double> v{0.1, 0.15, 0.3};
  const Histogram h = build_histogram(v);
  CHECK(h.counts.size() == 125);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 1);
  CHECK(h.total() == 3);
  CHECK(h.normalized[0] == 1.0);
  CHECK(h.normalized[1] == 0.5);
  CHECK(h.normalized[2] == 0.0);

  const Histogram edges = build_histogram(std::vector<double>{-0.1, 0.0, 0.2, 24.99, 25.0, 30.0});
  CHECK(edges.total() == 3);
  CHECK(edges.counts[0] == 1);
  CHECK(edges.counts[1] == 1);
  CHECK(edges.counts[124] == 1);

  CHECK(bin_count(0.2, 0, 25) == 125);
  CHECK(bin_count(0.3, 0, 1) == 4);
  CHECK(bin_count(0.1, 0, 1) == 10);

  Histogram grow = build_histogram({}, 1.0, 0.0, 5.0);
  CHECK(histogram_add(grow, 2.5));
  CHECK_FALSE(histogram_add(grow, 5.0));
  CHECK_FALSE(histogram_add(grow, std::nan("")));
  CHECK(grow.counts[2] == 1);
  normalize(grow);
  CHECK(grow.normalized[2] == 1.0);

  Histogram empty = build_histogram({});
  CHECK(std::all_of(empty.normalized.begin(), empty.normalized.end(),
                    [](double x) { return x == 0.0; }));
}

TEST_CASE("histogram totals match in-range samples") {
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> v(500);
    for (auto& x : v) x = rng.uniform() * 40 - 5;
    const auto in_range = std::count_if(v.begin(), v.end(), [](double x) { return x >= 0 && x < 25; });
    const Histogram h = build_histogram(v, 0.05 + rng.uniform());
    CHECK(h.total() == static_cast<std::uint64_t>(in_range));
    for (double n : h.normalized) CHECK((n >= 0.0 && n <= 1.0));
  }
}

TEST_CASE("power-law fit recovers synthetic exponents") {
  for (double alpha : {1.5, 2.5, 3.0}) {
    double err = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto sample = power_law_sample(seed, alpha, 1.0, 5000);
      const PowerLawFit fit = fit_power_law(sample);
      err += std::abs(fit.alpha_hat - alpha);
      CHECK_FALSE(fit.low_confidence);
      CHECK(fit.ks < 0.05);
    }
    CHECK(err / 5 < 0.05);
  }
}

TEST_CASE("fixed-cutoff MLE matches its closed form") {
  const std::vector<double> x{1, 2, 4, 8};
  double sum = 0;
  for (double v : x) sum += std::log(v);
  CHECK(power_law_alpha_mle(x, 1.0) == doctest::Approx(1.0 + 4.0 / sum));
  CHECK(power_law_alpha_mle(x, 2.0) == doctest::Approx(1.0 + 3.0 / (std::log(2.0) + std::log(4.0))));
}

TEST_CASE("exponential tails are told apart from power laws") {
  const auto pl = power_law_sample(7, 2.5, 1.0, 5000);
  const PowerLawFit fit = fit_power_law(pl);
  const ExponentialFit ex = fit_exponential_tail(pl, fit.xmin_hat);
  CHECK(ex.ks > 3 * fit.ks);
  CHECK(ex.n_tail == fit.n_tail);

  Rng rng(3);
  std::vector<double> e(5000);
  for (auto& x : e) x = 1.0 - std::log(1.0 - rng.uniform()) / 2.0;
  const ExponentialFit exf = fit_exponential_tail(e, 1.0);
  CHECK(exf.lambda == doctest::Approx(2.0).epsilon(0.05));
  CHECK(exf.ks < power_law_ks(e, power_law_alpha_mle(e, 1.0), 1.0));
}

TEST_CASE("degenerate samples") {
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{}), DegenerateSampleError);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{2, 2, 2}), DegenerateSampleError);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 0, 3}), DomainError);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, INFINITY}), DomainError);
  const PowerLawFit tiny = fit_power_law(std::vector<double>{1, 2, 3});
  CHECK(tiny.low_confidence);
}

TEST_CASE("power-law densities") {
  CHECK(power_law_pdf(2.0, 2.5, 2.0, PowerLawKind::Continuous) == doctest::Approx(1.5 / 2.0));
  CHECK(power_law_pdf(1.0, 2.0, 1.0, PowerLawKind::Discrete) ==
        doctest::Approx(6.0 / (std::numbers::pi * std::numbers::pi)));
  CHECK_THROWS_AS(power_law_pdf(0.5, 2.0, 1.0, PowerLawKind::Continuous), DomainError);
  CHECK_THROWS_AS(power_law_pdf(2.0, 1.0, 1.0, PowerLawKind::Continuous), DomainError);
  CHECK_THROWS_AS(power_law_pdf(2.0, 2.0, 0.0, PowerLawKind::Continuous), DomainError);

  // Continuous density integrates to one: substitute x = xmin / u.
  for (double alpha : {1.5, 2.2, 3.7}) {
    const int n = 200000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      const double u = (i + 0.5) / n;
      const double x = 1.5 / u;
      sum += power_law_pdf(x, alpha, 1.5, PowerLawKind::Continuous) * 1.5 / (u * u) / n;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(alpha < 2 ? 1e-3 : 1e-6));
  }
  double mass = 0;
  for (int k = 3; k < 200000; ++k) mass += power_law_pdf(k, 3.0, 3.0, PowerLawKind::Discrete);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hurwitz zeta reference values") {
  CHECK(hurwitz_zeta(3.0, 2.5) == doctest::Approx(0.118102025820863701).epsilon(1e-12));
  CHECK(hurwitz_zeta(1.5, 1.0) == doctest::Approx(2.61237534868548834).epsilon(1e-12));
  CHECK(hurwitz_zeta(2.5, 10.0) == doctest::Approx(0.0227286991945345405).epsilon(1e-12));
  CHECK(hurwitz_zeta(1.1, 3.0) == doctest::Approx(9.11793196918239727).epsilon(1e-10));
  CHECK(hurwitz_zeta(2.0, 1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-13));
  CHECK_THROWS_AS(hurwitz_zeta(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(hurwitz_zeta(2.0, 0.0), DomainError);
}

TEST_CASE("power-law sampler stays above xmin and matches the fit") {
  Rng rng(21);
  std::vector<double> v(20000);
  for (auto& x : v) {
    x = sample_power_law(rng, 2.5, 3.0);
    REQUIRE(x >= 3.0);
  }
  CHECK(power_law_alpha_mle(v, 3.0) == doctest::Approx(2.5).epsilon(0.03));
}

TEST_CASE("sandpile conserves grains") {
  Rng rng(5);
  Sandpile1D pile(30, 2);
  for (int k = 0; k < 5000; ++k) {
    pile.drop(rng.below(30));
    const std::int64_t expected =
        static_cast<std::int64_t>(pile.grains_added()) - static_cast<std::int64_t>(pile.grains_lost());
    REQUIRE(pile.mass() == expected);
    for (auto z : pile.slopes()) REQUIRE(z <= 2);
  }
  CHECK(pile.grains_lost() > 0);
}

TEST_CASE("sandpile edge cases") {
  Rng rng(1);
  const auto quiet = simulate_sandpile_1d(10, 1000000, 500, rng);
  CHECK(quiet.sizes.size() == 500);
  CHECK(std::all_of(quiet.sizes.begin(), quiet.sizes.end(), [](auto s) { return s == 0; }));

  Sandpile1D pile(5, 1);
  CHECK(pile.drop(2) == 0);
  CHECK(pile.mass() == 1);
  CHECK_THROWS_AS(Sandpile1D(1, 1), ConfigError);
  CHECK_THROWS_AS(Sandpile1D(5, 0), ConfigError);
}

TEST_CASE("bak-sneppen") {
  Rng rng(9);
  CHECK_THROWS_AS(simulate_bak_sneppen(2, 10, rng), ConfigError);
  const BakSneppenResult r = simulate_bak_sneppen(200, 20000, rng, 200000);
  CHECK(r.minima.size() == 20000);
  CHECK(r.threshold > 0.6);
  CHECK(r.threshold < 0.72);
  const auto below = std::count_if(r.minima.begin(), r.minima.end(),
                                   [&](double m) { return m < r.threshold; });
  const auto total = std::accumulate(r.avalanches.sizes.begin(), r.avalanches.sizes.end(),
                                     std::uint64_t{0});
  CHECK(static_cast<std::uint64_t>(below) == total);
  for (auto s : r.avalanches.sizes) CHECK(s > 0);
}
