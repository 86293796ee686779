#ifndef TIMELOC_EIGENSOLVER_HPP
#define TIMELOC_EIGENSOLVER_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

// Thin LAPACK wrappers for full Hermitian / symmetric eigendecompositions.
// Ascending eigenvalues, orthonormal eigenvectors in columns.

namespace timeloc {

struct EighResult {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

struct EighResultReal {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

inline EighResult eigh(const Eigen::MatrixXcd& H) {
  const lapack_int n = static_cast<lapack_int>(H.rows());
  if (H.cols() != n) throw std::invalid_argument("eigh: matrix not square");
  EighResult r;
  r.vectors = H;  // zheevd overwrites with eigenvectors
  r.values.resize(n);
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, r.vectors.data(),
                     n, r.values.data());
  if (info != 0)
    throw std::runtime_error("eigh: zheevd failed to converge, info = " +
                             std::to_string(info));
  return r;
}

inline Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& H) {
  const lapack_int n = static_cast<lapack_int>(H.rows());
  if (H.cols() != n) throw std::invalid_argument("eigvalsh: matrix not square");
  Eigen::MatrixXcd work = H;
  Eigen::VectorXd vals(n);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                                         work.data(), n, vals.data());
  if (info != 0)
    throw std::runtime_error("eigvalsh: zheevd failed, info = " +
                             std::to_string(info));
  return vals;
}

inline EighResultReal eigh(const Eigen::MatrixXd& H) {
  const lapack_int n = static_cast<lapack_int>(H.rows());
  if (H.cols() != n) throw std::invalid_argument("eigh: matrix not square");
  EighResultReal r;
  r.vectors = H;
  r.values.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                         r.vectors.data(), n, r.values.data());
  if (info != 0)
    throw std::runtime_error("eigh: dsyevd failed to converge, info = " +
                             std::to_string(info));
  return r;
}

}  // namespace timeloc

#endif
