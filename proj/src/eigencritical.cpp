#include "psolab/eigencritical.hpp"

#include <cmath>

#include "psolab/errors.hpp"

namespace psolab {

namespace {

RealMatrix to_matrix(const std::vector<std::vector<double>>& rows, std::size_t dims) {
  RealMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dims));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t d = 0; d < dims; ++d)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d];
  return m;
}

std::vector<std::vector<double>> to_rows(const RealMatrix& m) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rows[static_cast<std::size_t>(i)].assign(m.row(i).data(), m.row(i).data() + m.cols());
  return rows;
}

std::vector<std::vector<double>> current_positions(const SwarmState& state) {
  std::vector<std::vector<double>> rows;
  rows.reserve(state.size());
  for (const auto& p : state.particles) rows.push_back(p.position);
  return rows;
}

bool all_finite(const std::vector<std::vector<double>>& rows) {
  for (const auto& row : rows)
    for (double v : row)
      if (!std::isfinite(v)) return false;
  return true;
}

// 0 when the spectrum cannot be computed (non-finite entries, no convergence).
double safe_top_modulus(const RealMatrix& m) {
  if (!m.allFinite()) return 0.0;
  try {
    return eigenvalues(m).top_modulus();
  } catch (const DomainError&) {
    return 0.0;
  }
}

}  // namespace

RealMatrix positions_matrix(const SwarmState& state) {
  return to_matrix(current_positions(state), state.dims());
}

EigencriticalReport step_eigencritical(SwarmState& state, const PsoParams& params,
                                       const ObjectiveFn& objective, SwarmRng& rng,
                                       std::optional<double> velocity_limit) {
  if (state.size() < 2) throw ConfigError("eigencritical step needs at least 2 particles");

  EigencriticalReport report;
  Proposal proposal = propose_move(state, params, rng, velocity_limit);

  bool unmoved = true;
  for (std::size_t i = 0; i < state.size() && unmoved; ++i)
    unmoved = proposal.positions[i] == state.particles[i].position;
  if (unmoved) {
    report.committed_top_modulus = 1.0;
    commit_move(state, std::move(proposal.positions), std::move(proposal.velocities), objective);
    state.current_params = params;
    return report;
  }

  const RealMatrix now = positions_matrix(state);
  const RealMatrix next = to_matrix(proposal.positions, state.dims());
  const TransformFit fit = lstsq_transform(now, next);
  report.rank_deficient = fit.rank_deficient;
  // An ill-conditioned swarm can overflow the fit; treat that like a zero spectrum.
  report.raw_top_modulus = safe_top_modulus(fit.transform);

  std::vector<std::vector<double>> committed;
  if (report.raw_top_modulus > 0.0 && std::isfinite(report.raw_top_modulus)) {
    const RealMatrix transform = fit.transform / report.raw_top_modulus;
    report.committed_top_modulus = safe_top_modulus(transform);
    committed = to_rows(transform * now);
    if (!all_finite(committed)) committed.clear();
  }
  if (committed.empty()) {
    report.committed_top_modulus.reset();
    report.warning = "iteration " + std::to_string(state.iteration + 1) +
                     ": transform has a zero or non-finite spectrum; positions left unchanged";
    committed = current_positions(state);
  }

  commit_move(state, std::move(committed), std::move(proposal.velocities), objective);
  state.current_params = params;
  return report;
}

}  // namespace psolab
