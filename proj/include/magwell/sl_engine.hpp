#pragma once

// Eigenpairs of 1D Schrodinger operators -u'' + V(t) u with a confining
// potential, discretized by the three-point stencil on [-L, L] with
// Dirichlet conditions.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace magwell {

/// Uniform grid on [-L, L]; point 0 is -L, point n-1 is +L.
class Grid1D {
 public:
  static constexpr int kMinPoints = 16;

  Grid1D(double half_width, int n_points);

  double half_width() const { return half_width_; }
  int n_points() const { return n_points_; }
  int n_interior() const { return n_points_ - 2; }
  double spacing() const { return 2.0 * half_width_ / (n_points_ - 1); }
  double point(int i) const;

  /// Same interval, spacing halved (2n - 1 points).
  Grid1D refined() const { return Grid1D(half_width_, 2 * n_points_ - 1); }

 private:
  double half_width_;
  int n_points_;
};

using Potential = std::function<double(double)>;

/// Symmetric tridiagonal matrix acting on the interior grid points.
struct TridiagonalOperator {
  Grid1D grid;
  std::vector<double> diag;       // 2/dt^2 + V(t_i), interior points only
  double offdiag = 0.0;           // -1/dt^2
  std::vector<double> potential;  // V(t_i) on interior points

  int size() const { return static_cast<int>(diag.size()); }
};

/// Throws InvalidInput when V is non-finite at some grid point.
TridiagonalOperator assemble(const Potential& potential, const Grid1D& grid);

/// Number of eigenvalues of `op` strictly below `energy` (Sturm sequence).
int sturm_count(const TridiagonalOperator& op, double energy);

struct Spectrum1D {
  std::vector<double> eigenvalues;
  /// Values on all grid points (endpoints are zero), normalized so that
  /// sum u_i^2 * dt = 1 and the first non-negligible lobe is positive.
  std::vector<std::vector<double>> eigenfunctions;
  Grid1D grid{1.0, Grid1D::kMinPoints};
  /// Per eigenvalue. Residual bound for the discrete problem from
  /// lowest_eigenpairs; Richardson difference from eigenvalue_converged.
  std::vector<double> convergence;

  int count() const { return static_cast<int>(eigenvalues.size()); }
};

/// The m_count lowest eigenpairs of the discrete operator. Eigenvalues are
/// bracketed by Sturm bisection, vectors come from inverse iteration and the
/// reported value is the Rayleigh quotient evaluated in difference form.
Spectrum1D lowest_eigenpairs(const TridiagonalOperator& op, int m_count, double tol);

struct ConvergedEigenvalue {
  double value = 0.0;      // Richardson-extrapolated continuum estimate
  double estimate = 0.0;   // |last two extrapolations|
  Spectrum1D spectrum;     // eigenpairs 0..m on the finest grid used
  Grid1D coarse{1.0, Grid1D::kMinPoints};  // partner grid of the final Richardson pair
};

struct ConvergenceOptions {
  double initial_half_width = 1.0;
  int coarse_points_per_half_width = 100;
  int max_points = 1 << 20;
  int max_doublings = 12;
};

/// lambda_m of the continuum operator to within `tol`.
ConvergedEigenvalue eigenvalue_converged(const Potential& potential, int m, double tol,
                                         const ConvergenceOptions& options = {});

enum class Parity { Even, Odd, None };

struct ParityResult {
  Parity parity = Parity::None;
  double residual = 0.0;
};

/// Mirror-symmetry classification of each eigenfunction. Only meaningful
/// when the caller knows the potential is even.
std::vector<ParityResult> parity_classify(const Spectrum1D& spectrum, double threshold = 1e-6);

std::string to_string(Parity p);

/// Number of sign changes, ignoring samples below `rel_floor * max|u|`.
int sign_changes(std::span<const double> u, double rel_floor = 1e-8);

/// sum f(t_i) u_i v_i dt over the grid.
double grid_inner(const Grid1D& grid, std::span<const double> u, std::span<const double> v,
                  const std::function<double(double)>& weight = {});

std::string spectrum_to_csv(const Spectrum1D& spectrum);

}  // namespace magwell
