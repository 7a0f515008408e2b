#include "magwell/sparse_eigs.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "magwell/errors.hpp"

namespace magwell {

namespace {

template <typename Scalar>
double gershgorin_lower(const Eigen::SparseMatrix<Scalar>& h) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(h.rows());
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(h.rows());
  for (int col = 0; col < h.outerSize(); ++col) {
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(h, col); it; ++it) {
      if (it.row() == it.col()) {
        diag[it.row()] += std::real(it.value());
      } else {
        radius[it.row()] += std::abs(it.value());
      }
    }
  }
  return (diag - radius).minCoeff();
}

template <typename Scalar>
using Factor = Eigen::SimplicialLLT<Eigen::SparseMatrix<Scalar>, Eigen::Lower, Eigen::AMDOrdering<int>>;

template <typename Scalar>
std::unique_ptr<Factor<Scalar>> factor_shifted(const Eigen::SparseMatrix<Scalar>& h, double shift) {
  Eigen::SparseMatrix<Scalar> id(h.rows(), h.cols());
  id.setIdentity();
  Eigen::SparseMatrix<Scalar> shifted = h - Scalar(shift) * id;
  auto f = std::make_unique<Factor<Scalar>>();
  f->compute(shifted);
  if (f->info() != Eigen::Success) return nullptr;
  return f;
}

template <typename Scalar>
typename SparseEigenResult<Scalar>::Matrix random_block(int rows, int cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  typename SparseEigenResult<Scalar>::Matrix x(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      if constexpr (std::is_same_v<Scalar, double>) {
        x(i, j) = dist(rng);
      } else {
        const double re = dist(rng);
        const double im = dist(rng);
        x(i, j) = Scalar(re, im);
      }
    }
  }
  return x;
}

}  // namespace

template <typename Scalar>
SparseEigenResult<Scalar> lowest_eigenpairs_sparse(const Eigen::SparseMatrix<Scalar>& h, int count,
                                                   const SparseEigenOptions& options) {
  using Matrix = typename SparseEigenResult<Scalar>::Matrix;
  const int n = static_cast<int>(h.rows());
  if (h.rows() != h.cols()) throw InvalidInput("lowest_eigenpairs_sparse: matrix must be square");
  if (count < 1 || count > n) throw InvalidInput("lowest_eigenpairs_sparse: bad eigenvalue count");
  const int block = std::min(n, count + std::max(options.guard_vectors, count / 2));

  const double gersh = gershgorin_lower(h);
  const double floor_shift = gersh - 1e-12 * (1.0 + std::abs(gersh));
  double shift = options.shift.value_or(floor_shift);
  auto factor = factor_shifted(h, shift);
  // A failed Cholesky means the shift is not below the spectrum; back off
  // towards the Gershgorin bound.
  for (int attempt = 1; !factor && attempt <= 5; ++attempt) {
    shift = attempt < 5 ? floor_shift + (shift - floor_shift) * 0.25 : floor_shift;
    factor = factor_shifted(h, shift);
  }
  if (!factor) throw NumericalError("lowest_eigenpairs_sparse: shifted matrix is not positive definite");
  bool reshifted = !options.reshift;

  Matrix x = random_block<Scalar>(n, block, options.seed);
  SparseEigenResult<Scalar> out;
  Eigen::VectorXd theta;
  Matrix hx;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Matrix y(n, block);
    for (int j = 0; j < block; ++j) y.col(j) = factor->solve(x.col(j));
    Eigen::HouseholderQR<Matrix> qr(y);
    Matrix q = qr.householderQ() * Matrix::Identity(n, block);
    Matrix hq = h * q;
    Matrix small = q.adjoint() * hq;
    small = (0.5 * (small + small.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(small);
    theta = es.eigenvalues();
    x = q * es.eigenvectors();
    hx = hq * es.eigenvectors();

    out.residuals.assign(count, 0.0);
    bool done = true;
    for (int j = 0; j < count; ++j) {
      out.residuals[j] = (hx.col(j) - theta[j] * x.col(j)).norm();
      if (!(out.residuals[j] <= options.tol)) done = false;
    }
    out.iterations = it;
    if (done) break;

    // Once the bottom of the spectrum is pinned down, move the shift just
    // below it; the Ritz value is an upper bound, the residual bounds the gap.
    if (!reshifted && out.residuals[0] < 1e-3 * (theta[count] - theta[0])) {
      const double candidate = theta[0] - out.residuals[0] - (theta[std::min(count, block - 1)] - theta[0]);
      if (candidate > shift) {
        if (auto f = factor_shifted(h, candidate)) {
          factor = std::move(f);
          shift = candidate;
        }
      }
      reshifted = true;
    }
    if (it == options.max_iterations) {
      std::ostringstream msg;
      msg << "lowest_eigenpairs_sparse: no convergence after " << it << " iterations; worst residual "
          << *std::max_element(out.residuals.begin(), out.residuals.end()) << " (target " << options.tol << ")";
      throw NumericalError(msg.str());
    }
  }
  out.values.assign(theta.data(), theta.data() + count);
  out.vectors = x.leftCols(count);
  out.final_shift = shift;
  return out;
}

template SparseEigenResult<double> lowest_eigenpairs_sparse(const Eigen::SparseMatrix<double>&, int,
                                                            const SparseEigenOptions&);
template SparseEigenResult<std::complex<double>> lowest_eigenpairs_sparse(
    const Eigen::SparseMatrix<std::complex<double>>&, int, const SparseEigenOptions&);

}  // namespace magwell
