#include "wmkubo/linalg.hpp"

#include <cmath>
#include <string>

namespace wmkubo {

SpectralPropagator::SpectralPropagator(const Operator& h, double tol) {
  if (h.rows() != h.cols()) {
    throw DimensionError("SpectralPropagator: generator must be square");
  }
  if (!is_hermitian(h, tol)) {
    throw NotHermitianError("SpectralPropagator: generator is not Hermitian (max |h - h^dagger| = " +
                            std::to_string(max_abs(h - h.adjoint())) + ")");
  }
  const Operator herm = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Operator> solver(herm);
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Operator SpectralPropagator::at(double s) const {
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> phases(values_.size());
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    phases(k) = std::polar(1.0, -s * values_(k));
  }
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Operator hermitian_exp(const Operator& h, double s) {
  if (s == 0.0) {
    if (!is_hermitian(h)) throw NotHermitianError("hermitian_exp: generator is not Hermitian");
    return identity(h.rows());
  }
  return SpectralPropagator(h).at(s);
}

Operator positive_power(const Operator& m, double p) {
  if (!is_hermitian(m)) throw NotHermitianError("positive_power: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Operator> solver((m + m.adjoint()) / 2.0);
  const RealVector& values = solver.eigenvalues();
  if (values.minCoeff() <= 0.0) {
    throw std::domain_error("positive_power: operator is not positive definite");
  }
  RealVector powered(values.size());
  for (Eigen::Index k = 0; k < values.size(); ++k) powered(k) = std::pow(values(k), p);
  return solver.eigenvectors() * powered.cast<Complex>().asDiagonal() *
         solver.eigenvectors().adjoint();
}

}  // namespace wmkubo
