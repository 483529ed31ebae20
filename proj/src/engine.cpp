#include "psolab/engine.hpp"

#include "psolab/analysis.hpp"
#include "psolab/errors.hpp"

namespace psolab {

Engine::Engine(SwarmConfig config, PsoParams params, std::optional<AdaptiveConfig> adaptive)
    : config_(config),
      params_(params),
      initial_params_(params),
      adaptive_(adaptive),
      objective_(objective_fn(config.objective)) {
  config_.validate();
  params_.validate();
  if (params_.schedule == InertiaSchedule::Linear && config_.iterations == 0)
    throw ConfigError("linear inertia schedule needs iterations > 0");
  if (config_.variant == Variant::Adaptive && !adaptive_)
    throw ConfigError("adaptive variant needs an adaptive configuration");
  if (config_.variant != Variant::Adaptive && adaptive_)
    throw ConfigError("adaptive configuration given for a non-adaptive variant");
  if (adaptive_) adaptive_->validate();

  rng_ = SwarmRng(config_.seed, config_.n_particles);
  state_ = init_swarm(config_, params_, rng_);
  initial_msd_ = msd_to_centroid(state_);
  initial_best_ = state_.global_best_fitness;
  if (adaptive_) metric_trace_ = init_metric_trace(adaptive_->metric, state_, config_.boundary_radius);
}

StepOutcome Engine::step() {
  const PsoParams used = scheduled_params(params_, state_.iteration, config_.iterations);
  StepOutcome out;
  switch (config_.variant) {
    case Variant::Standard:
      step_standard(state_, used, objective_, rng_, config_.velocity_limit);
      break;
    case Variant::Eigencritical:
      out.eigen = step_eigencritical(state_, used, objective_, rng_, config_.velocity_limit);
      break;
    case Variant::Adaptive: {
      AdaptiveStep adapted = step_adaptive(state_, used, *adaptive_, objective_, rng_, metric_trace_,
                                           config_.boundary_radius, config_.velocity_limit);
      metric_trace_ = adapted.trace;
      params_.alpha1 = adapted.params.alpha1;
      params_.alpha2 = adapted.params.alpha2;
      params_.omega = adapted.params.omega;
      out.adaptive = std::move(adapted);
      break;
    }
  }
  out.record.iteration = state_.iteration;
  out.record.best_fitness = state_.global_best_fitness;
  out.record.msd = msd_to_centroid(state_);
  out.record.alpha1 = used.alpha1;
  out.record.alpha2 = used.alpha2;
  out.record.omega = used.omega;
  return out;
}

void Engine::set_params(const PsoParams& params) {
  if (config_.variant == Variant::Adaptive)
    throw ConfigError("adaptive variant parameters are locked while it runs");
  params.validate();
  params_ = params;
}

}  // namespace psolab
