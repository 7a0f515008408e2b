#pragma once

// Lowest eigenpairs of a sparse Hermitian positive-definite-after-shift
// matrix by shift-invert subspace iteration with Rayleigh-Ritz.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <optional>
#include <vector>

namespace magwell {

struct SparseEigenOptions {
  double tol = 1e-10;            // absolute residual ||Hv - lambda v|| for unit v
  std::optional<double> shift;   // must lie below the spectrum; default Gershgorin bound
  int guard_vectors = 4;         // extra subspace vectors beyond the requested count
  int max_iterations = 2000;
  bool reshift = true;           // move the shift up once the bottom is located
  unsigned seed = 12345;
};

template <typename Scalar>
struct SparseEigenResult {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<double> values;
  Matrix vectors;                // unit-norm columns
  std::vector<double> residuals;
  int iterations = 0;
  double final_shift = 0.0;
};

/// The `count` smallest eigenvalues of the Hermitian matrix H (full storage).
/// Throws NumericalError if the residual target is not met.
template <typename Scalar>
SparseEigenResult<Scalar> lowest_eigenpairs_sparse(const Eigen::SparseMatrix<Scalar>& h, int count,
                                                   const SparseEigenOptions& options = {});

extern template SparseEigenResult<double> lowest_eigenpairs_sparse(const Eigen::SparseMatrix<double>&, int,
                                                                   const SparseEigenOptions&);
extern template SparseEigenResult<std::complex<double>> lowest_eigenpairs_sparse(
    const Eigen::SparseMatrix<std::complex<double>>&, int, const SparseEigenOptions&);

}  // namespace magwell
