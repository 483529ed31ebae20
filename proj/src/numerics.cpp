#include "psolab/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "psolab/errors.hpp"

namespace psolab {

TransformFit lstsq_transform(const RealMatrix& x_now, const RealMatrix& x_next) {
  if (x_now.rows() < 1 || x_now.cols() < 1) throw ShapeError("lstsq_transform needs N, D >= 1");
  if (x_now.rows() != x_next.rows() || x_now.cols() != x_next.cols())
    throw ShapeError("lstsq_transform needs matrices of identical shape");

  // D x N system A Z = B with A = x_now^T, Z = C^T, B = x_next^T.
  const Eigen::MatrixXd a = x_now.transpose();
  const Eigen::MatrixXd b = x_next.transpose();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);

  TransformFit fit;
  fit.rank = cod.rank();
  fit.rank_deficient = fit.rank < x_now.rows();
  fit.transform = cod.solve(b).transpose();
  fit.residual = (x_next - fit.transform * x_now).norm();
  return fit;
}

Spectrum eigenvalues(const RealMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("eigenvalues needs a square matrix");
  if (!m.allFinite()) throw DomainError("eigenvalues needs finite entries");

  Spectrum out;
  if (m.rows() == 0) return out;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw DomainError("eigenvalue iteration did not converge");

  const auto& values = solver.eigenvalues();
  out.eigenvalues.assign(values.data(), values.data() + values.size());
  std::stable_sort(out.eigenvalues.begin(), out.eigenvalues.end(),
                   [](const std::complex<double>& a, const std::complex<double>& b) {
                     const double ma = std::abs(a), mb = std::abs(b);
                     if (ma != mb) return ma > mb;
                     if (a.real() != b.real()) return a.real() > b.real();
                     return a.imag() > b.imag();
                   });
  return out;
}

RealMatrix spectral_normalize(const RealMatrix& m) {
  const double top = eigenvalues(m).top_modulus();
  if (!(top > 0.0) || !std::isfinite(top))
    throw SingularSpectrumError("largest eigenvalue modulus is zero; cannot normalize");
  return m / top;
}

RealMatrix dynamic_matrix(double alpha1, double alpha2, double omega) {
  const double theta = 0.5 * (alpha1 + alpha2);
  RealMatrix a(2, 2);
  a << 1.0 - theta, omega,
       -theta,      omega;
  return a;
}

RealMatrix input_matrix(double alpha1, double alpha2) {
  const double theta = 0.5 * (alpha1 + alpha2);
  RealMatrix b(2, 1);
  b << theta, theta;
  return b;
}

double attractor(double alpha1, double alpha2, double personal_best, double global_best) {
  const double total = alpha1 + alpha2;
  if (total == 0.0) return 0.5 * (personal_best + global_best);
  return (alpha1 / total) * personal_best + (alpha2 / total) * global_best;
}

Spectrum dynamic_matrix_eigs(double alpha1, double alpha2, double omega) {
  return eigenvalues(dynamic_matrix(alpha1, alpha2, omega));
}

Stability classify(const Spectrum& spectrum, double tolerance) {
  const double top = spectrum.top_modulus();
  if (top > 1.0 + tolerance) return Stability::Chaotic;
  if (top < 1.0 - tolerance) return Stability::Stagnant;
  return Stability::Critical;
}

}  // namespace psolab
