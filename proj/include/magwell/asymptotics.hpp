#pragma once

// Semiclassical predictions for the low spectrum of the magnetic Laplacian
// near a hypersurface well: two-term quasimode energies, ground-energy
// bounds, gap windows, and log-log fits of measured energies.

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

namespace magwell {

/// h-exponents for vanishing order k.
double leading_exponent(int k);    // (2k+2)/(k+2)
double splitting_exponent(int k);  // (2k+3)/(k+2)
double bound_exponent(int k);      // (6k+8)/(3(k+2))
double residual_exponent(int k);   // (4k+7)/(2k+4)

/// nu_hat omega_min^{2/(k+2)} h^{(2k+2)/(k+2)} + lambda h^{(2k+3)/(k+2)}
double quasimode_energy(double h, int k, double omega_min, double nu_hat, double lambda_level);

/// Leading term -/+ C h^{(6k+8)/(3(k+2))}.
std::pair<double, double> ground_energy_bounds(double h, int k, double omega_min, double nu_hat, double c);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  int below = 0;  // index of the distinct level under the gap
};

struct GapPrediction {
  std::vector<Interval> gaps;
  std::vector<std::string> warnings;
};

/// Open gaps between consecutive distinct quasimode energies built from the
/// first N+1 entries of `k_levels`, each shrunk by r(h) = c_res h^{(4k+7)/(2k+4)}.
/// Equal levels (multiplicities) are merged; pairs closer than 2 r(h) give no gap.
GapPrediction gap_intervals(double h, int k, double omega_min, double nu_hat, const std::vector<double>& k_levels,
                            int n_gaps, double c_res = 1.0);

struct ExponentFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  double r2 = 0.0;
  int samples = 0;
};

/// Least squares for log E = log C + p log h. Needs >= 4 samples spanning a
/// decade in h and positive energies.
ExponentFit exponent_fit(const std::vector<double>& h, const std::vector<double>& energy);

struct GapForecast {
  int k = 1;
  double omega_min = 1.0;
  double nu_hat = 0.0;
  std::vector<double> k_levels;
  std::vector<double> h_values;
  std::vector<std::vector<double>> z;  // z[i][m] at h_values[i]
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<GapPrediction> gaps;
  int n_gaps = 0;
  double error_constant = 1.0;
  double c_res = 1.0;
  std::vector<std::string> warnings;
};

GapForecast make_forecast(int k, double omega_min, double nu_hat, const std::vector<double>& k_levels,
                          const std::vector<double>& h_values, int n_gaps, double error_constant = 1.0,
                          double c_res = 1.0);

nlohmann::json to_json(const GapForecast& f);

/// Columns h, z_0..z_N, then gap_lo_i, gap_hi_i per gap; dropped gaps are empty cells.
std::string forecast_to_csv(const GapForecast& f);

}  // namespace magwell
