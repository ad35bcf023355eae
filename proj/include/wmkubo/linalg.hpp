#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <complex>
#include <cstddef>
#include <stdexcept>

namespace wmkubo {

template <class Scalar_>
using complex_type = std::complex<Scalar_>;

// Dense operator on a finite Hilbert space. Row-major: entry (i, j) lives at
// data()[i * dim + j].
template <class Scalar_>
using operator_type = Eigen::Matrix<complex_type<Scalar_>, Eigen::Dynamic,
                                    Eigen::Dynamic, Eigen::RowMajor>;

template <class Scalar_>
using real_matrix_type = Eigen::Matrix<Scalar_, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>;

template <class Scalar_>
using real_vector_type = Eigen::Matrix<Scalar_, Eigen::Dynamic, 1>;

using Complex = complex_type<double>;
using Operator = operator_type<double>;
using RealMatrix = real_matrix_type<double>;
using RealVector = real_vector_type<double>;

// Default tolerances. Structural checks (hermiticity, positivity, unitarity)
// use `structural`; algebraic identities between two routes use `algebraic`.
struct Tolerances {
  static constexpr double structural = 1e-10;
  static constexpr double algebraic = 1e-12;
  static constexpr double completeness = 1e-8;
  static constexpr double normalization = 1e-8;
  static constexpr double denominator_floor = 1e-12;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotHermitianError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Operator identity(Eigen::Index dim) { return Operator::Identity(dim, dim); }

template <class Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().maxCoeff();
}

template <class Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m,
                  typename Derived::RealScalar tol = Tolerances::structural) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol;
}

template <class Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m,
                typename Derived::RealScalar tol = Tolerances::structural) {
  if (m.rows() != m.cols()) return false;
  using Plain = typename Derived::PlainObject;
  return max_abs(m.adjoint() * m - Plain::Identity(m.rows(), m.cols())) <= tol;
}

// Smallest eigenvalue of the Hermitian part of m.
template <class Derived>
typename Derived::RealScalar min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  const Plain herm = (m + m.adjoint()) / typename Derived::RealScalar(2);
  Eigen::SelfAdjointEigenSolver<Plain> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

template <class Derived>
bool is_psd(const Eigen::MatrixBase<Derived>& m,
            typename Derived::RealScalar tol = Tolerances::structural) {
  if (!is_hermitian(m, tol)) return false;
  return min_eigenvalue(m) >= -tol;
}

// (a ⊗ b)(i * db + k, j * db + l) = a(i, j) * b(k, l)
template <class DA, class DB>
auto tensor_product(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(
      a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Tr_S over the first factor of a (dim_s * dim_d)-dimensional operator.
template <class Derived>
auto partial_trace_system(const Eigen::MatrixBase<Derived>& m, Eigen::Index dim_s,
                          Eigen::Index dim_d) {
  if (dim_s <= 0 || dim_d <= 0 || m.rows() != dim_s * dim_d || m.cols() != m.rows()) {
    throw DimensionError("partial_trace_system: operator dimension does not match dim_s*dim_d");
  }
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(dim_d, dim_d);
  for (Eigen::Index s = 0; s < dim_s; ++s) {
    out += m.block(s * dim_d, s * dim_d, dim_d, dim_d);
  }
  return out;
}

// Tr_D over the second factor.
template <class Derived>
auto partial_trace_detector(const Eigen::MatrixBase<Derived>& m, Eigen::Index dim_s,
                            Eigen::Index dim_d) {
  if (dim_s <= 0 || dim_d <= 0 || m.rows() != dim_s * dim_d || m.cols() != m.rows()) {
    throw DimensionError("partial_trace_detector: operator dimension does not match dim_s*dim_d");
  }
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(dim_s, dim_s);
  for (Eigen::Index i = 0; i < dim_s; ++i) {
    for (Eigen::Index j = 0; j < dim_s; ++j) {
      out(i, j) = m.block(i * dim_d, j * dim_d, dim_d, dim_d).trace();
    }
  }
  return out;
}

// Tr(a b) without forming the product.
template <class DA, class DB>
typename DA::Scalar trace_product(const Eigen::MatrixBase<DA>& a,
                                  const Eigen::MatrixBase<DB>& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

// Spectral form of a Hermitian generator: evaluates exp(-i s h) for any s
// from one eigendecomposition.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Operator& h, double tol = Tolerances::structural);

  Operator at(double s) const;
  Eigen::Index dim() const { return vectors_.rows(); }
  const RealVector& eigenvalues() const { return values_; }

 private:
  RealVector values_;
  Operator vectors_;
};

// exp(-i s h) for Hermitian h; throws NotHermitianError otherwise.
Operator hermitian_exp(const Operator& h, double s);

// m^p for positive definite m (p = 0.5 and p = -0.5 are the uses).
Operator positive_power(const Operator& m, double p);

}  // namespace wmkubo
