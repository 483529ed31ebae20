#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace psolab {

using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Eigenvalues sorted by descending modulus; ties by descending real part,
/// then descending imaginary part.
struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;

  double top_modulus() const { return eigenvalues.empty() ? 0.0 : std::abs(eigenvalues.front()); }
};

struct TransformFit {
  RealMatrix transform;  // N x N
  Eigen::Index rank = 0;
  bool rank_deficient = false;
  /// Frobenius norm of x_next - transform * x_now.
  double residual = 0.0;
};

/// Least-squares C minimizing ||x_next - C x_now||_F for N x D position
/// matrices (one particle per row). Solved as x_now^T C^T = x_next^T with a
/// Householder complete orthogonal decomposition, which yields the
/// minimum-norm solution when x_now lacks full row rank.
TransformFit lstsq_transform(const RealMatrix& x_now, const RealMatrix& x_next);

/// All (complex) eigenvalues of a real square matrix.
Spectrum eigenvalues(const RealMatrix& m);

/// m / |lambda_1|. Throws SingularSpectrumError when the top modulus is zero
/// or not finite.
RealMatrix spectral_normalize(const RealMatrix& m);

/// Per-dimension dynamic matrix of the expected-value PSO recurrence,
/// acting on the state (x, v): [[1 - theta, omega], [-theta, omega]],
/// theta = (alpha1 + alpha2) / 2.
RealMatrix dynamic_matrix(double alpha1, double alpha2, double omega);

/// Input matrix [theta, theta]^T that feeds the attractor into the state.
RealMatrix input_matrix(double alpha1, double alpha2);

/// Attractor alpha1/(alpha1+alpha2) p + alpha2/(alpha1+alpha2) g; the midpoint
/// when both weights are zero.
double attractor(double alpha1, double alpha2, double personal_best, double global_best);

Spectrum dynamic_matrix_eigs(double alpha1, double alpha2, double omega);

enum class Stability { Stagnant, Critical, Chaotic };

/// All moduli below one: stagnant; any above one: chaotic; otherwise critical.
Stability classify(const Spectrum& spectrum, double tolerance = 1e-12);

}  // namespace psolab
