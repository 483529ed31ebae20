#include "psolab/adaptive.hpp"

#include <algorithm>
#include <cmath>

#include "psolab/errors.hpp"

namespace psolab {

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double norm(const std::vector<double>& a) {
  double sum = 0.0;
  for (double v : a) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace

void AdaptiveConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("adaptive epsilon must lie in (0, 1)");
}

PsoParams adaptive_default_params() {
  PsoParams p;
  p.alpha1 = 1.0;
  p.alpha2 = 1.0;
  p.omega = 0.815;
  return p;
}

double measure(MetricId metric, const SwarmState& state) {
  const std::size_t n = state.size();
  if (n < 2) throw ConfigError("swarm metrics need at least 2 particles");

  switch (metric) {
    case MetricId::ParticleDist: {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          sum += distance(state.particles[i].position, state.particles[j].position);
      return sum / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
    }
    case MetricId::CentroidDist: {
      std::vector<double> centroid(state.dims(), 0.0);
      for (const auto& p : state.particles)
        for (std::size_t d = 0; d < centroid.size(); ++d) centroid[d] += p.position[d];
      for (double& c : centroid) c /= static_cast<double>(n);
      double sum = 0.0;
      for (const auto& p : state.particles) sum += distance(p.position, centroid);
      return sum / static_cast<double>(n);
    }
    case MetricId::VelNorm: {
      double sum = 0.0;
      for (const auto& p : state.particles) sum += norm(p.velocity);
      return sum / static_cast<double>(n);
    }
  }
  return 0.0;
}

double squash(double x, double boundary) {
  // 2 * sigmoid(x / eta) - 1 == tanh(x / (2 eta)), and 2 eta == boundary.
  return std::tanh(x / boundary);
}

PsoParams apply_rule(RuleId rule, const PsoParams& params, double delta_s, double epsilon) {
  PsoParams out = params;
  auto update = [&](double theta) {
    const double shift = rule == RuleId::Dependant ? epsilon * delta_s : epsilon * delta_s * theta;
    return std::max(0.0, theta - shift);
  };
  out.alpha1 = update(params.alpha1);
  out.alpha2 = update(params.alpha2);
  out.omega = update(params.omega);
  return out;
}

MetricTrace init_metric_trace(MetricId metric, const SwarmState& state, double boundary) {
  MetricTrace trace;
  trace.raw_current = measure(metric, state);
  trace.raw_previous = trace.raw_current;
  trace.current = squash(trace.raw_current, boundary);
  trace.previous = trace.current;
  return trace;
}

AdaptiveStep step_adaptive(SwarmState& state, const PsoParams& params, const AdaptiveConfig& config,
                           const ObjectiveFn& objective, SwarmRng& rng, const MetricTrace& trace,
                           double boundary, std::optional<double> velocity_limit) {
  step_standard(state, params, objective, rng, velocity_limit);

  AdaptiveStep out;
  out.trace.raw_previous = trace.raw_current;
  out.trace.previous = trace.current;
  out.trace.raw_current = measure(config.metric, state);
  out.trace.current = squash(out.trace.raw_current, boundary);
  out.delta_s = config.delta_mode == DeltaMode::SquashThenDiff
                    ? out.trace.current - out.trace.previous
                    : squash(out.trace.raw_current - out.trace.raw_previous, boundary);
  out.params = apply_rule(config.rule, params, out.delta_s, config.epsilon);
  return out;
}

std::string_view to_string(MetricId m) {
  switch (m) {
    case MetricId::ParticleDist: return "particle_dist";
    case MetricId::CentroidDist: return "centroid_dist";
    case MetricId::VelNorm: return "vel_norm";
  }
  return "?";
}

std::string_view to_string(RuleId r) {
  switch (r) {
    case RuleId::Dependant: return "dependant";
    case RuleId::Independent: return "independent";
  }
  return "?";
}

std::string_view to_string(DeltaMode d) {
  switch (d) {
    case DeltaMode::SquashThenDiff: return "squash_then_diff";
    case DeltaMode::DiffThenSquash: return "diff_then_squash";
  }
  return "?";
}

std::optional<MetricId> parse_metric(std::string_view name) {
  for (auto m : {MetricId::ParticleDist, MetricId::CentroidDist, MetricId::VelNorm})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

std::optional<RuleId> parse_rule(std::string_view name) {
  for (auto r : {RuleId::Dependant, RuleId::Independent})
    if (name == to_string(r)) return r;
  return std::nullopt;
}

std::optional<DeltaMode> parse_delta_mode(std::string_view name) {
  for (auto d : {DeltaMode::SquashThenDiff, DeltaMode::DiffThenSquash})
    if (name == to_string(d)) return d;
  return std::nullopt;
}

}  // namespace psolab
