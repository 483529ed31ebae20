#pragma once

#include <optional>
#include <string>

#include "psolab/numerics.hpp"
#include "psolab/swarm.hpp"

namespace psolab {

struct EigencriticalReport {
  /// |lambda_1| of the committed transform (1 up to rounding), or nullopt
  /// when the step fell back to leaving positions in place.
  std::optional<double> committed_top_modulus;
  /// |lambda_1| of the raw least-squares transform before normalization.
  double raw_top_modulus = 0.0;
  bool rank_deficient = false;
  std::optional<std::string> warning;
};

RealMatrix positions_matrix(const SwarmState& state);

/// One Eigencritical iteration.
///
/// A standard move is proposed but not committed; the N x N transform C
/// mapping current to proposed positions is fitted by least squares, scaled
/// so its top eigenvalue has modulus one, and applied to the current
/// positions. Velocities are taken from the proposal. Only committed
/// positions are scored. If C has an all-zero or non-finite spectrum (every
/// particle at the origin, or a collapsed swarm overflowing the fit)
/// positions stay where they are and a warning is reported.
EigencriticalReport step_eigencritical(SwarmState& state, const PsoParams& params,
                                       const ObjectiveFn& objective, SwarmRng& rng,
                                       std::optional<double> velocity_limit = std::nullopt);

}  // namespace psolab
