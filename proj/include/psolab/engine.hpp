#pragma once

#include <cstdint>
#include <optional>

#include "psolab/adaptive.hpp"
#include "psolab/eigencritical.hpp"
#include "psolab/swarm.hpp"

namespace psolab {

struct IterationRecord {
  std::uint64_t iteration = 0;
  double best_fitness = 0.0;
  double msd = 0.0;
  /// Coefficients the iteration ran under.
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double omega = 0.0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct StepOutcome {
  IterationRecord record;
  std::optional<EigencriticalReport> eigen;
  std::optional<AdaptiveStep> adaptive;
};

/// Owns one swarm of any variant and advances it an iteration at a time.
/// Not thread-safe; one thread drives it.
class Engine {
 public:
  /// `adaptive` is required for (and only accepted with) the Adaptive variant.
  Engine(SwarmConfig config, PsoParams params, std::optional<AdaptiveConfig> adaptive = {});

  const SwarmConfig& config() const noexcept { return config_; }
  const SwarmState& state() const noexcept { return state_; }
  const std::optional<AdaptiveConfig>& adaptive_config() const noexcept { return adaptive_; }
  /// Coefficients the next iteration will use (before any inertia schedule).
  const PsoParams& params() const noexcept { return params_; }
  const PsoParams& initial_params() const noexcept { return initial_params_; }

  std::size_t iteration() const noexcept { return state_.iteration; }
  bool done() const noexcept { return state_.iteration >= config_.iterations; }
  double initial_msd() const noexcept { return initial_msd_; }
  double initial_best_fitness() const noexcept { return initial_best_; }

  /// Runs one iteration. Throws EvaluationError from the objective.
  StepOutcome step();

  /// Replaces the coefficients used from the next iteration on. Rejected
  /// (ConfigError) for the Adaptive variant, whose coefficients are locked.
  void set_params(const PsoParams& params);

 private:
  SwarmConfig config_;
  PsoParams params_;
  PsoParams initial_params_;
  std::optional<AdaptiveConfig> adaptive_;
  ObjectiveFn objective_;
  SwarmRng rng_;
  SwarmState state_;
  MetricTrace metric_trace_;
  double initial_msd_ = 0.0;
  double initial_best_ = 0.0;
};

}  // namespace psolab
