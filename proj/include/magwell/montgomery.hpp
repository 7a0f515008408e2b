#pragma once

// The Montgomery family Q(alpha, beta) = -d^2/dt^2 + (beta t^{k+1}/(k+1) - alpha)^2:
// band functions, their alpha-derivatives, the band minimum nu_hat and the
// identities and non-degeneracy criteria that hold at the minimum.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "magwell/sl_engine.hpp"

namespace magwell {

struct ModelParams {
  int k = 1;
  double alpha = 0.0;
  double beta = 1.0;

  void validate() const;
};

/// (beta t^{k+1}/(k+1) - alpha)^2
Potential montgomery_potential(const ModelParams& p);

/// t^{k+1}/(k+1)
double flux_profile(int k, double t);

/// lambda_m(alpha, beta) to within tol. Reduces beta < 0 to beta > 0 by
/// symmetry, then to beta = 1 by scaling.
double lambda_m(const ModelParams& params, int m, double tol);

/// Band functions of Q(alpha, 1) on a fixed Richardson pair of grids
/// (`grid` and `grid.refined()`). Every quantity is the extrapolation
/// (4 F_fine - F_coarse) / 3 of the exact discrete quantity, so the
/// derivatives below are the derivatives of lambda0() itself.
class BandSolver {
 public:
  BandSolver(int k, Grid1D grid);

  /// Picks a grid that meets `tol` for levels 0..levels-1 over [alpha_lo, alpha_hi].
  static BandSolver for_range(int k, double alpha_lo, double alpha_hi, int levels, double tol);

  int k() const { return k_; }
  const Grid1D& grid() const { return grid_; }

  struct Sample {
    double alpha = 0.0;
    std::vector<double> levels;  // extrapolated lambda_0.. of Q(alpha, 1)
    Spectrum1D coarse;
    Spectrum1D fine;
  };

  Sample sample(double alpha, int levels = 1) const;
  double lambda0(double alpha) const;

  /// Hellmann-Feynman: -2 int (t^{k+1}/(k+1) - alpha) u0^2 dt.
  double dlambda(double alpha) const;
  double dlambda(const Sample& s) const;

  /// 2 - 4 int (t^{k+1}/(k+1) - alpha) u0 w dt with w = du0/dalpha from the
  /// reduced-resolvent solve (Q - lambda0) w = 2 (p - alpha) u0 + lambda0' u0,
  /// w orthogonal to u0.
  double d2lambda(double alpha, double solve_tol = 1e-9) const;
  double d2lambda(const Sample& s, double solve_tol = 1e-9) const;

  /// int f(t) u0(t)^2 dt, extrapolated.
  double ground_expectation(const Sample& s, const std::function<double(double)>& f) const;

 private:
  int k_;
  Grid1D grid_;
};

/// du0/dalpha on one discrete grid, orthogonal to u0 (same grid as `s`).
/// Throws NumericalError when the linear-solve residual exceeds solve_tol.
std::vector<double> ground_state_alpha_derivative(int k, double alpha, const Spectrum1D& s, double solve_tol);

struct LocalMinimum {
  double alpha = 0.0;
  double lambda0 = 0.0;
};

struct MinimizerReport {
  int k = 1;
  double alpha_min = 0.0;
  double nu_hat = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double d2 = 0.0;      // d^2 lambda0 / dalpha^2 at alpha_min, resolvent route
  double d2_fd = 0.0;   // same by second central differences (step 1e-3)
  double d2_lower_bound = 0.0;
  bool condik_holds = false;
  double condik_margin = 0.0;  // (k+2) lambda1 - (k+6) nu_hat
  std::optional<bool> condik_odd_holds;
  std::optional<double> condik_odd_margin;  // (k+2) lambda2 - (k+6) nu_hat, odd k
  double norm_identity_lhs = 0.0;
  double norm_identity_residual = 0.0;
  double lambda01_residual = 0.0;
  double hf_residual = 0.0;
  std::vector<LocalMinimum> local_minima_scan;
  double scan_lo = 0.0;
  double scan_hi = 0.0;
  double tol = 0.0;
  Grid1D grid{1.0, Grid1D::kMinPoints};
};

struct MinimizeOptions {
  std::optional<double> scan_lo;  // default -1
  std::optional<double> scan_hi;  // default 2 + k
  double scan_step = 0.02;
  double alpha_tol = 1e-6;
};

/// Global minimum of lambda0(., 1) with every field of the report populated.
/// Throws NumericalError if the lowest scanned value sits on the scan boundary.
MinimizerReport minimize_alpha(int k, double tol, const MinimizeOptions& options = {});

/// Hellmann-Feynman derivative of lambda0(alpha, 1), converged to tol.
double dlambda_dalpha(int k, double alpha, double tol);

struct SecondDerivative {
  double value = 0.0;
  double finite_difference = 0.0;
};

/// Resolvent-route second derivative; throws NumericalError when it disagrees
/// with second differences of lambda0 (step 1e-3) by more than 10 * tol.
SecondDerivative d2lambda_dalpha2(int k, double alpha, double tol);

struct IdentityReport {
  int k = 1;
  double lambda01_residual = 0.0;   // |int (p - alpha_min) u0^2|
  double norm_lhs = 0.0;            // ||(p - alpha_min) u0||^2
  double norm_rhs = 0.0;            // nu_hat / (k + 2)
  double norm_residual = 0.0;
  bool lambda01_pass = false;
  bool norm_pass = false;
  bool pass() const { return lambda01_pass && norm_pass; }
};

IdentityReport verify_identities(const MinimizerReport& report, double tol);

struct NondegeneracyVerdict {
  bool condik_holds = false;
  double condik_margin = 0.0;
  std::optional<bool> condik_odd_holds;
  std::optional<double> condik_odd_margin;
  double bound = 0.0;                 // 2((k+2)l1 - (k+6)nu)/((k+2)(l1 - nu))
  std::optional<double> bound_odd;    // same with lambda2, odd k
  bool d2_above_bound = false;        // d2 >= bound - tol
};

NondegeneracyVerdict nondegeneracy_check(const MinimizerReport& report, double tol = 1e-3);

/// 2((k+2) l1 - (k+6) nu) / ((k+2)(l1 - nu))
double nondegeneracy_bound(int k, double nu_hat, double lambda1);

struct ProfileRow {
  double alpha = 0.0;
  double lambda0 = 0.0;
  double lambda_quad = 0.0;
};

struct ProfileTable {
  int k = 1;
  double alpha_min = 0.0;
  double nu_hat = 0.0;
  double d2 = 0.0;
  std::vector<ProfileRow> rows;
  bool contains_alpha_min = true;

  double lambda_quad(double alpha) const { return nu_hat + 0.5 * d2 * (alpha - alpha_min) * (alpha - alpha_min); }
};

ProfileTable profile(const MinimizerReport& report, double alpha_lo, double alpha_hi, int n_samples,
                     double tol = 1e-7);

std::string profile_to_csv(const ProfileTable& table);

struct DerivativeCheck {
  double alpha = 0.0;
  double hellmann_feynman = 0.0;
  double finite_difference = 0.0;  // Richardson-combined central differences of lambda_m
  double residual = 0.0;
};

/// Hellmann-Feynman derivative against central differences of independently
/// converged eigenvalues (steps 2e-3 and 1e-3).
DerivativeCheck hellmann_feynman_check(int k, double alpha, double tol = 1e-9);

struct ScalingCheck {
  ModelParams params;
  double direct = 0.0;  // lambda0(alpha, beta) from the beta potential itself
  double scaled = 0.0;  // beta^{2/(k+2)} lambda0(beta^{-1/(k+2)} alpha, 1)
  double residual = 0.0;
};

/// Scaling law for beta > 0 (beta < 0 goes through the reflection first).
ScalingCheck scaling_check(const ModelParams& params, double tol = 1e-10);

/// Parities of eigenfunctions 0..m_max of Q(alpha, 1) for an even potential.
std::vector<ParityResult> parity_check(int k, double alpha, int m_max, double tol = 1e-10);

struct LargeAlphaRow {
  double alpha = 0.0;
  double lambda0 = 0.0;
  double asymptote = 0.0;          // ((k+1) alpha)^{k/(k+1)}
  double ratio = 0.0;              // lambda0 / asymptote
  double stated_asymptote = 0.0;   // (k+1)^{2k/(k+1)} alpha^{k/(k+1)}
  double stated_ratio = 0.0;
};

/// Ratios of lambda0(alpha, 1) to the harmonic large-alpha asymptote, k odd.
std::vector<LargeAlphaRow> large_alpha_check(int k, const std::vector<double>& alphas, double tol = 1e-8);

}  // namespace magwell
