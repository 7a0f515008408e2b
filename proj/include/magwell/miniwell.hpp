#pragma once

// The effective operator
//   K = c_omega D_omega + D_perp + sum_rm Omega_rm s_r s_m + A
// attached to a non-degenerate minimum of |omega_{0,1}| on the zero set of
// the field, and its spectrum.

#include <Eigen/Dense>
#include <complex>
#include <json.hpp>
#include <string>
#include <vector>

#include "magwell/montgomery.hpp"

namespace magwell {

/// Geometric data at the miniwell point, in normal coordinates along S.
/// Vectors have length n-1, matrices are (n-1)x(n-1); domega01(j, r) is the
/// derivative of the j-th component of omega_{0,1} along s_r.
struct MiniwellGeometry {
  int n = 2;
  Eigen::VectorXd omega01;
  Eigen::MatrixXd domega01;
  Eigen::MatrixXd hess_abs2;
  Eigen::VectorXd omega02;
  double gdot00 = 0.0;
  Eigen::VectorXd gdot0j;
  Eigen::MatrixXd gdotjl;
  double gamma00 = 0.0;
  Eigen::VectorXd gammaj0;
  double domega_div = 0.0;

  int dim() const { return n - 1; }
  double omega_min() const { return omega01.norm(); }

  /// Throws InvalidInput on shape errors, |omega01| = 0, a violated gradient
  /// condition (beyond 1e-8) or a Hessian that is not symmetric positive definite.
  void validate() const;

  /// Flat cylinder with field t^k omega(s): n = 2, omega01 = (omega_min),
  /// hess_abs2 = ((omega^2)''(s1)), all other data zero.
  static MiniwellGeometry flat_2d(double omega_min, double abs2_curvature);
};

/// Reads the JSON object with keys n, omega01, domega01, hess_abs2, omega02,
/// gdot00, gdot0j, gdotjl, gamma00, gammaj0, domega_div. n, omega01 and
/// hess_abs2 are required, the rest default to zero; unknown keys are rejected.
MiniwellGeometry geometry_from_json(const nlohmann::json& j);
MiniwellGeometry load_geometry(const std::string& path);
nlohmann::json to_json(const MiniwellGeometry& g);

struct Moments1D {
  double m_tau_upp = 0.0;  // int tau u'' u
  double m_mixed = 0.0;    // int tau^{k+2}/(k+2) (tau^{k+1}/(k+1) - alpha) u^2
  double m_tau_sq = 0.0;   // int tau (tau^{k+1}/(k+1) - alpha)^2 u^2
};

/// Quadratures with the ground state of `ground` on its own grid; u'' uses
/// the three-point stencil of the assembled operator.
Moments1D moments_1d(int k, double alpha_min, const Spectrum1D& ground);

/// Richardson-extrapolated moments for the converged ground state at (k, alpha_min).
Moments1D converged_moments(int k, double alpha_min, double tol = 1e-8);

Eigen::MatrixXd build_Omega(const MiniwellGeometry& g, int k, const MinimizerReport& report);

/// The four contributions to A; the divergence term is the only imaginary one.
struct ATerms {
  std::complex<double> metric_normal;      // -gdot00 m_tau_upp
  std::complex<double> divergence;         // i omega_min^{-1} domega_div alpha_min
  std::complex<double> omega02;            // 2 omega_min^{-2} (omega01 . omega02) m_mixed
  std::complex<double> metric_tangential;  // omega_min^{-2} (omega01^T gdotjl omega01) m_tau_sq

  std::complex<double> total() const { return metric_normal + divergence + omega02 + metric_tangential; }
};

ATerms build_A_terms(const MiniwellGeometry& g, int k, const MinimizerReport& report, const Moments1D& moments);
std::complex<double> build_A(const MiniwellGeometry& g, int k, const MinimizerReport& report,
                             const Moments1D& moments);

struct EffectiveOperatorK {
  int k = 1;
  double alpha_min = 0.0;
  double c_omega = 1.0;
  Eigen::VectorXd e_omega;
  Eigen::MatrixXd Omega;
  std::complex<double> A_const{0.0, 0.0};

  int dim() const { return static_cast<int>(e_omega.size()); }
  /// Kinetic matrix I + (c_omega - 1) e e^T.
  Eigen::MatrixXd kinetic() const;
};

EffectiveOperatorK build_K(const MiniwellGeometry& g, const MinimizerReport& report, const Moments1D& moments);

struct KSpectrum {
  enum class Branch { Nondegenerate, Degenerate };

  Branch branch = Branch::Nondegenerate;
  std::vector<double> levels;                  // non-degenerate branch
  std::vector<std::vector<int>> multi_indices;  // quantum numbers of each level
  std::vector<double> frequencies;             // sqrt(mu_j), ascending
  double bottom = 0.0;                         // lowest point of the spectrum
  std::vector<double> k0_frequencies;          // degenerate branch: oscillator on e_omega^perp
  Eigen::VectorXd e_omega_prime;               // degenerate branch
  double omega_prime_11 = 0.0;                 // Omega(e', e'), degenerate branch
  std::complex<double> A_const{0.0, 0.0};
  bool imag_A_warning = false;
};

std::string to_string(KSpectrum::Branch b);

/// Closed-form spectrum. Throws NumericalError if c_omega < 0 or Omega is not
/// positive definite.
KSpectrum spectrum_K(const EffectiveOperatorK& K, int count);

struct OracleGrid {
  double box_lengths = 0.0;     // half width in oscillator lengths; 0 picks from count
  int points_per_length = 8;    // coarse grid; the Richardson partner halves it
  long max_unknowns = 200000;   // fine grid budget
};

struct OracleResult {
  std::vector<double> levels;   // Richardson-extrapolated
  std::vector<double> coarse;
  std::vector<double> fine;
  int n_x = 0;                  // coarse interior points per axis
  int n_y = 0;
};

/// Finite-difference diagonalization of K, n-1 <= 2, in the frame (e_omega, e_omega^perp).
/// In the degenerate branch only the bottom is returned.
OracleResult spectrum_K_oracle(const EffectiveOperatorK& K, int count, const OracleGrid& grid = {});

nlohmann::json to_json(const EffectiveOperatorK& K);
nlohmann::json to_json(const KSpectrum& s);

}  // namespace magwell
