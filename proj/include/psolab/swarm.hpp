#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "psolab/objectives.hpp"
#include "psolab/rng.hpp"

namespace psolab {

enum class InertiaSchedule { Constant, Linear };

/// The tunable PSO coefficients.
///
/// alpha1 weighs the cognitive pull toward the personal best, alpha2 the
/// social pull toward the global best, omega the previous velocity. With a
/// Linear schedule omega is ignored and the inertia moves from omega_top down
/// to omega_bottom over the run.
struct PsoParams {
  double alpha1 = 1.494;
  double alpha2 = 1.494;
  double omega = 0.729;
  double omega_top = 0.8;
  double omega_bottom = 0.4;
  InertiaSchedule schedule = InertiaSchedule::Constant;

  /// Library-level check: everything non-negative and finite, schedule ordered.
  void validate() const;
  /// Interactive bounds: alphas in [0, 4], omega in [0, 2].
  void validate_ui_bounds() const;

  friend bool operator==(const PsoParams&, const PsoParams&) = default;
};

inline constexpr double kAlphaUiMax = 4.0;
inline constexpr double kOmegaUiMax = 2.0;

enum class Variant { Standard, Eigencritical, Adaptive };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

struct SwarmConfig {
  std::size_t n_particles = 20;
  std::size_t dims = 20;
  std::size_t iterations = 1000;
  /// Radius of the origin-centred ball used for initial placement.
  double boundary_radius = 500.0;
  ObjectiveId objective = ObjectiveId::Sphere;
  Variant variant = Variant::Standard;
  std::uint64_t seed = 0;
  /// Per-component velocity clamp. Off unless set.
  std::optional<double> velocity_limit;

  void validate() const;
};

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_fitness = 0.0;
};

struct SwarmState {
  std::vector<Particle> particles;
  std::vector<double> global_best_position;
  double global_best_fitness = 0.0;
  std::size_t iteration = 0;
  PsoParams current_params;

  std::size_t size() const noexcept { return particles.size(); }
  std::size_t dims() const noexcept { return global_best_position.size(); }
};

/// Uniform placement inside the D-ball of radius B, zero velocities.
SwarmState init_swarm(const SwarmConfig& config, const PsoParams& params, SwarmRng& rng);

/// Inertia at iteration t of a run lasting config.iterations.
double omega_at(std::size_t t, const SwarmConfig& config, const PsoParams& params);

/// Copy of params with omega replaced by the scheduled value for iteration t.
PsoParams scheduled_params(const PsoParams& params, std::size_t t, std::size_t iterations);

/// Next positions/velocities for every particle without touching the state.
struct Proposal {
  std::vector<std::vector<double>> positions;
  std::vector<std::vector<double>> velocities;
};

/// Draws one r1, r2 pair per dimension per particle from that particle's stream.
Proposal propose_move(const SwarmState& state, const PsoParams& params, SwarmRng& rng,
                      std::optional<double> velocity_limit = std::nullopt);

/// Moves particles to the given positions, scores them, updates personal
/// bests on strict improvement, then the global best, then advances t.
/// Throws EvaluationError on a non-finite objective value.
void commit_move(SwarmState& state, std::vector<std::vector<double>> positions,
                 std::vector<std::vector<double>> velocities, const ObjectiveFn& objective);

/// One iteration of the inertia-weight PSO.
void step_standard(SwarmState& state, const PsoParams& params, const ObjectiveFn& objective,
                   SwarmRng& rng, std::optional<double> velocity_limit = std::nullopt);

}  // namespace psolab
