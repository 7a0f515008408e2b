#pragma once

// Direct discretization of H = (h D_t)^2 + (h D_s - A_s)^2 on the flat
// cylinder [0, S) x [-T, T] with A_s = t^{k+1} omega(s)/(k+1), so that the
// field t^k omega(s) vanishes to order k on t = 0.

#include <Eigen/Sparse>
#include <complex>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "magwell/asymptotics.hpp"
#include "magwell/miniwell.hpp"
#include "magwell/montgomery.hpp"

namespace magwell {

struct Field2DConfig {
  int k = 1;
  std::string profile = "sin2";  // "sin2": omega_min (1 + a sin^2(pi (s - s1)/S)); "constant": omega_min
  double omega_min = 1.0;
  double a = 1.0;
  double s1 = 0.0;
  double S = 1.0;
  double T = 0.0;                      // absolute half width; 0 means t_half_width_lengths * l(h)
  double t_half_width_lengths = 4.5;
  int n_s = 256;
  int n_t = 96;
  std::vector<double> h_list;          // descending; empty picks the default sequence
  int levels = 4;                      // eigenvalues per h
  double tol = 1e-11;                  // eigensolver residual target
  bool check_resolution = true;
  bool zero_gauge = false;             // test hook: A_s = 0
  double gauge_amplitude = 0.0;        // test hook: add d(phi), phi = amp sin(2 pi mode s / S)
  int gauge_mode = 1;
  double c_res = 1.0;
  int calibration_points = 0;          // largest-h rows used to fit the band constant; 0 = half

  double omega(double s) const;
  double phi(double s) const;
  /// (omega^2)''(s1) in closed form.
  double abs2_curvature() const;
  double magnetic_length(double h) const;  // h^{1/(k+2)} omega_min^{-1/(k+2)}
  double half_width(double h) const;
  int required_n_t(double h) const;
  int required_n_s(double h) const;
  /// Smallest h the resolution rule allows at this grid.
  double smallest_resolved_h() const;
  std::vector<double> effective_h_list() const;

  void validate() const;
};

Field2DConfig config_from_json(const nlohmann::json& j);
Field2DConfig load_config(const std::string& path);
nlohmann::json to_json(const Field2DConfig& c);

struct Operator2D {
  Eigen::SparseMatrix<std::complex<double>> H;
  double h = 0.0;
  double T = 0.0;
  double dt = 0.0;
  double ds = 0.0;
  int n_s = 0;
  int n_t = 0;

  /// Unknown index of (s_j, t_i); t runs fastest.
  int index(int j, int i) const { return j * n_t + i; }
};

/// Throws InvalidInput when the grid under-resolves the magnetic length
/// (message names the required n_t and n_s).
Operator2D assemble_2d(const Field2DConfig& config, double h);

struct Eigen2D {
  std::vector<double> values;
  std::vector<double> residuals;
  int iterations = 0;
};

Eigen2D lowest_eigenvalues_2d(const Operator2D& op, int m_count, double tol,
                              std::optional<double> shift = std::nullopt);

/// Exact eigenvalues of the discrete operator with A_s = 0.
std::vector<double> zero_gauge_eigenvalues(const Field2DConfig& config, double h, int count);

/// For s-independent omega: the lowest eigenvalues of the union over discrete
/// Fourier modes of the 1D fiber operators on the same t grid.
std::vector<double> fiber_eigenvalues(const Field2DConfig& config, double h, int count);

/// Matrix Market coordinate format, 1-based, all stored entries.
std::string export_coo(const Operator2D& op);

struct Sweep2DRow {
  double h = 0.0;
  double T = 0.0;
  std::vector<double> lambda;
  std::vector<double> z;
  std::vector<double> residuals;
  int iterations = 0;
  bool pre_asymptotic = false;  // leading term < 10x correction term
};

struct Sweep2DReport {
  Field2DConfig config;
  double nu_hat = 0.0;
  double alpha_min = 0.0;
  double d2 = 0.0;
  bool has_miniwell = false;
  std::vector<double> k_levels;
  std::vector<Sweep2DRow> rows;

  ExponentFit leading_fit;
  std::optional<ExponentFit> splitting_fit;
  double leading_limit = 0.0;              // nu_hat omega_min^{2/(k+2)}
  double leading_ratio = 0.0;              // lambda_0 / h^{(2k+2)/(k+2)} at the smallest h, over leading_limit
  std::vector<double> splitting_measured;  // (lambda_{m+1} - lambda_m) / h^{(2k+3)/(k+2)} at the smallest h
  std::vector<double> splitting_predicted; // K_{m+1} - K_m
  double band_constant = 0.0;              // fitted on the calibration rows
  bool band_holds = false;                 // every row, every level
  bool gaps_clear = false;                 // no measured eigenvalue inside a predicted gap
  int gap_count = 0;
  std::vector<std::string> warnings;
};

/// Runs every h of the configuration (in parallel when workers > 1) and
/// compares with the predictions built from `report`.
Sweep2DReport run_sweep(const Field2DConfig& config, const MinimizerReport& report, int workers = 1);

nlohmann::json to_json(const Sweep2DReport& r);

/// Columns h, lambda_0.., z_0..
std::string sweep_to_csv(const Sweep2DReport& r);

}  // namespace magwell
