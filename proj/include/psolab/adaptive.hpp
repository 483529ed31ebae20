#pragma once

#include <optional>
#include <string_view>

#include "psolab/swarm.hpp"

namespace psolab {

/// Swarm-dynamics measure driving the parameter adaptation.
enum class MetricId {
  ParticleDist,  ///< mean distance over all unordered particle pairs
  CentroidDist,  ///< mean distance from each particle to the centroid
  VelNorm,       ///< mean velocity norm
};

enum class RuleId {
  Dependant,    ///< theta -= eps * dS          (same shift for every parameter)
  Independent,  ///< theta -= eps * dS * theta  (shift proportional to the value)
};

/// Order of squashing and differencing when forming dS.
enum class DeltaMode {
  SquashThenDiff,  ///< dS = squash(m(t+1)) - squash(m(t)), in (-2, 2)
  DiffThenSquash,  ///< dS = squash(m(t+1) - m(t)), in (-1, 1)
};

struct AdaptiveConfig {
  double epsilon = 0.1;
  MetricId metric = MetricId::VelNorm;
  RuleId rule = RuleId::Dependant;
  DeltaMode delta_mode = DeltaMode::SquashThenDiff;

  /// epsilon must lie in (0, 1).
  void validate() const;

  friend bool operator==(const AdaptiveConfig&, const AdaptiveConfig&) = default;
};

/// Start values for the adaptive variant's coefficients.
PsoParams adaptive_default_params();

/// Last two metric observations. previous/current are squashed values in
/// [-1, 1]; the raw fields keep the unsquashed measurements.
struct MetricTrace {
  double previous = 0.0;
  double current = 0.0;
  double raw_previous = 0.0;
  double raw_current = 0.0;
};

double measure(MetricId metric, const SwarmState& state);

/// (sigmoid(x / eta) - 0.5) * 2 with eta = boundary / 2, i.e. tanh(x / boundary).
double squash(double x, double boundary);

/// Applies the rule to alpha1, alpha2 and omega; results are clamped at 0.
PsoParams apply_rule(RuleId rule, const PsoParams& params, double delta_s, double epsilon);

/// Seeds the trace from the swarm before its first adaptive step.
MetricTrace init_metric_trace(MetricId metric, const SwarmState& state, double boundary);

struct AdaptiveStep {
  PsoParams params;  ///< coefficients for the NEXT iteration
  MetricTrace trace;
  double delta_s = 0.0;
};

/// One standard step under `params`, then measure, squash, difference and
/// adapt. The returned params take effect on the following iteration.
AdaptiveStep step_adaptive(SwarmState& state, const PsoParams& params, const AdaptiveConfig& config,
                           const ObjectiveFn& objective, SwarmRng& rng, const MetricTrace& trace,
                           double boundary,
                           std::optional<double> velocity_limit = std::nullopt);

std::string_view to_string(MetricId m);
std::string_view to_string(RuleId r);
std::string_view to_string(DeltaMode d);
std::optional<MetricId> parse_metric(std::string_view name);
std::optional<RuleId> parse_rule(std::string_view name);
std::optional<DeltaMode> parse_delta_mode(std::string_view name);

}  // namespace psolab
