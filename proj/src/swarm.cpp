#include "psolab/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psolab/errors.hpp"

namespace psolab {

namespace {

bool nonneg_finite(double v) { return std::isfinite(v) && v >= 0.0; }

double score(const ObjectiveFn& objective, std::size_t particle, const std::vector<double>& x) {
  const double value = objective(x);
  if (!std::isfinite(value)) throw EvaluationError(particle, x, value);
  return value;
}

void refresh_global_best(SwarmState& state) {
  for (const auto& p : state.particles) {
    if (p.best_fitness < state.global_best_fitness) {
      state.global_best_fitness = p.best_fitness;
      state.global_best_position = p.best_position;
    }
  }
}

}  // namespace

void PsoParams::validate() const {
  if (!nonneg_finite(alpha1) || !nonneg_finite(alpha2) || !nonneg_finite(omega))
    throw ConfigError("alpha1, alpha2 and omega must be finite and non-negative");
  if (!nonneg_finite(omega_top) || !nonneg_finite(omega_bottom))
    throw ConfigError("omega_top and omega_bottom must be finite and non-negative");
  if (schedule == InertiaSchedule::Linear && omega_bottom > omega_top)
    throw ConfigError("linear inertia schedule needs omega_bottom <= omega_top");
}

void PsoParams::validate_ui_bounds() const {
  validate();
  if (alpha1 > kAlphaUiMax || alpha2 > kAlphaUiMax)
    throw ConfigError("alpha1 and alpha2 must lie in [0, 4]");
  if (omega > kOmegaUiMax || omega_top > kOmegaUiMax || omega_bottom > kOmegaUiMax)
    throw ConfigError("omega must lie in [0, 2]");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Standard: return "standard";
    case Variant::Eigencritical: return "eigencritical";
    case Variant::Adaptive: return "adaptive";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (auto v : {Variant::Standard, Variant::Eigencritical, Variant::Adaptive}) {
    if (name == to_string(v)) return v;
  }
  return std::nullopt;
}

void SwarmConfig::validate() const {
  if (n_particles < 2) throw ConfigError("need at least 2 particles");
  if (dims < 1) throw ConfigError("need at least 1 dimension");
  if (!(boundary_radius > 0.0) || !std::isfinite(boundary_radius))
    throw ConfigError("boundary radius must be positive and finite");
  if (velocity_limit && !(*velocity_limit > 0.0))
    throw ConfigError("velocity limit must be positive");
}

SwarmState init_swarm(const SwarmConfig& config, const PsoParams& params, SwarmRng& rng) {
  config.validate();
  params.validate();
  if (rng.size() != config.n_particles)
    throw ConfigError("random stream count does not match particle count");

  const std::size_t dims = config.dims;
  SwarmState state;
  state.current_params = params;
  state.particles.resize(config.n_particles);
  state.global_best_fitness = std::numeric_limits<double>::infinity();
  const ObjectiveFn objective = objective_fn(config.objective);

  for (std::size_t i = 0; i < config.n_particles; ++i) {
    Rng& stream = rng.particle(i);
    Particle& p = state.particles[i];
    p.position.resize(dims);
    double norm2 = 0.0;
    // Gaussian direction; retry the (probability-zero) all-zero draw.
    do {
      norm2 = 0.0;
      for (double& x : p.position) {
        x = stream.normal();
        norm2 += x * x;
      }
    } while (norm2 == 0.0);
    const double radius =
        config.boundary_radius * std::pow(stream.uniform(), 1.0 / static_cast<double>(dims));
    const double scale = radius / std::sqrt(norm2);
    for (double& x : p.position) x *= scale;

    p.velocity.assign(dims, 0.0);
    p.best_position = p.position;
    p.best_fitness = score(objective, i, p.position);
  }

  state.global_best_position = state.particles.front().best_position;
  state.global_best_fitness = state.particles.front().best_fitness;
  refresh_global_best(state);
  return state;
}

double omega_at(std::size_t t, const SwarmConfig& config, const PsoParams& params) {
  if (params.schedule == InertiaSchedule::Constant) return params.omega;
  if (config.iterations == 0) throw ConfigError("linear inertia schedule needs iterations > 0");
  const double fraction = static_cast<double>(t) / static_cast<double>(config.iterations);
  return params.omega_top - fraction * (params.omega_top - params.omega_bottom);
}

PsoParams scheduled_params(const PsoParams& params, std::size_t t, std::size_t iterations) {
  if (params.schedule == InertiaSchedule::Constant) return params;
  SwarmConfig config;
  config.iterations = iterations;
  PsoParams out = params;
  out.omega = omega_at(std::min(t, iterations), config, params);
  return out;
}

Proposal propose_move(const SwarmState& state, const PsoParams& params, SwarmRng& rng,
                      std::optional<double> velocity_limit) {
  const std::size_t n = state.size();
  const std::size_t dims = state.dims();
  const auto& g = state.global_best_position;

  Proposal out;
  out.positions.resize(n);
  out.velocities.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Particle& p = state.particles[i];
    Rng& stream = rng.particle(i);
    auto& v = out.velocities[i];
    auto& x = out.positions[i];
    v.resize(dims);
    x.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      const double r1 = stream.uniform();
      const double r2 = stream.uniform();
      double vd = params.omega * p.velocity[d] +
                  params.alpha1 * r1 * (p.best_position[d] - p.position[d]) +
                  params.alpha2 * r2 * (g[d] - p.position[d]);
      if (velocity_limit) vd = std::clamp(vd, -*velocity_limit, *velocity_limit);
      v[d] = vd;
      x[d] = p.position[d] + vd;
    }
  }
  return out;
}

void commit_move(SwarmState& state, std::vector<std::vector<double>> positions,
                 std::vector<std::vector<double>> velocities, const ObjectiveFn& objective) {
  const std::size_t n = state.size();
  if (positions.size() != n || velocities.size() != n)
    throw ShapeError("move does not cover every particle");

  // Score everything first so a failed evaluation leaves the state untouched.
  std::vector<double> fitness(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Particle& p = state.particles[i];
    if (positions[i].size() != p.position.size() || velocities[i].size() != p.velocity.size())
      throw ShapeError("move has the wrong dimension for particle " + std::to_string(i));
    fitness[i] = score(objective, i, positions[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Particle& p = state.particles[i];
    p.position = std::move(positions[i]);
    p.velocity = std::move(velocities[i]);
    if (fitness[i] < p.best_fitness) {
      p.best_fitness = fitness[i];
      p.best_position = p.position;
    }
  }
  refresh_global_best(state);
  ++state.iteration;
}

void step_standard(SwarmState& state, const PsoParams& params, const ObjectiveFn& objective,
                   SwarmRng& rng, std::optional<double> velocity_limit) {
  Proposal move = propose_move(state, params, rng, velocity_limit);
  commit_move(state, std::move(move.positions), std::move(move.velocities), objective);
  state.current_params = params;
}

}  // namespace psolab
