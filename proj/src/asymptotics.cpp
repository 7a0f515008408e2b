#include "magwell/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "magwell/csv.hpp"
#include "magwell/errors.hpp"

namespace magwell {

namespace {

void check_k(int k) {
  if (k < 1) throw InvalidInput("vanishing order k must be >= 1");
}

void check_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("h must be positive and finite");
}

}  // namespace

double leading_exponent(int k) { return (2.0 * k + 2.0) / (k + 2.0); }
double splitting_exponent(int k) { return (2.0 * k + 3.0) / (k + 2.0); }
double bound_exponent(int k) { return (6.0 * k + 8.0) / (3.0 * (k + 2.0)); }
double residual_exponent(int k) { return (4.0 * k + 7.0) / (2.0 * k + 4.0); }

double quasimode_energy(double h, int k, double omega_min, double nu_hat, double lambda_level) {
  check_h(h);
  check_k(k);
  if (!(omega_min > 0.0)) throw InvalidInput("omega_min must be positive");
  return nu_hat * std::pow(omega_min, 2.0 / (k + 2.0)) * std::pow(h, leading_exponent(k)) +
         lambda_level * std::pow(h, splitting_exponent(k));
}

std::pair<double, double> ground_energy_bounds(double h, int k, double omega_min, double nu_hat, double c) {
  if (!(c >= 0.0)) throw InvalidInput("error constant C must be non-negative");
  const double lead = quasimode_energy(h, k, omega_min, nu_hat, 0.0);
  const double err = c * std::pow(h, bound_exponent(k));
  return {lead - err, lead + err};
}

GapPrediction gap_intervals(double h, int k, double omega_min, double nu_hat, const std::vector<double>& k_levels,
                            int n_gaps, double c_res) {
  check_h(h);
  if (n_gaps < 1) throw InvalidInput("gap_intervals: N must be >= 1");
  if (static_cast<int>(k_levels.size()) < n_gaps + 1) {
    throw InvalidInput("gap_intervals: need at least N+1 K levels");
  }
  if (!(c_res >= 0.0)) throw InvalidInput("gap_intervals: c_res must be non-negative");
  std::vector<double> levels(k_levels.begin(), k_levels.begin() + n_gaps + 1);
  if (!std::is_sorted(levels.begin(), levels.end())) throw InvalidInput("gap_intervals: K levels must ascend");

  std::vector<double> distinct;
  for (double l : levels) {
    if (distinct.empty() || l - distinct.back() > 1e-12 * std::max(1.0, std::abs(l))) distinct.push_back(l);
  }
  const double r = c_res * std::pow(h, residual_exponent(k));
  GapPrediction out;
  for (std::size_t m = 0; m + 1 < distinct.size(); ++m) {
    const double z0 = quasimode_energy(h, k, omega_min, nu_hat, distinct[m]);
    const double z1 = quasimode_energy(h, k, omega_min, nu_hat, distinct[m + 1]);
    if (z1 - z0 <= 2.0 * r) {
      std::ostringstream msg;
      msg << "h=" << format_number(h) << ": levels " << distinct[m] << " and " << distinct[m + 1]
          << " are closer than the residual margin; no gap predicted";
      out.warnings.push_back(msg.str());
      continue;
    }
    out.gaps.push_back({z0 + r, z1 - r, static_cast<int>(m)});
  }
  return out;
}

ExponentFit exponent_fit(const std::vector<double>& h, const std::vector<double>& energy) {
  if (h.size() != energy.size()) throw InvalidInput("exponent_fit: h and energy lengths differ");
  const int n = static_cast<int>(h.size());
  if (n < 4) throw InvalidInput("exponent_fit: need at least 4 samples");
  double hmin = h[0], hmax = h[0];
  for (int i = 0; i < n; ++i) {
    if (!(h[i] > 0.0)) throw InvalidInput("exponent_fit: h values must be positive");
    if (!(energy[i] > 0.0)) throw InvalidInput("exponent_fit: energies must be positive");
    hmin = std::min(hmin, h[i]);
    hmax = std::max(hmax, h[i]);
  }
  if (hmax / hmin < 10.0 * (1.0 - 1e-12)) throw InvalidInput("exponent_fit: h must span at least one decade");
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += std::log(h[i]);
    sy += std::log(energy[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = std::log(h[i]) - mx, dy = std::log(energy[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  ExponentFit f;
  f.samples = n;
  f.exponent = sxy / sxx;
  f.coefficient = std::exp(my - f.exponent * mx);
  double ss_res = 0;
  for (int i = 0; i < n; ++i) {
    const double pred = std::log(f.coefficient) + f.exponent * std::log(h[i]);
    ss_res += (std::log(energy[i]) - pred) * (std::log(energy[i]) - pred);
  }
  f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

GapForecast make_forecast(int k, double omega_min, double nu_hat, const std::vector<double>& k_levels,
                          const std::vector<double>& h_values, int n_gaps, double error_constant, double c_res) {
  check_k(k);
  if (h_values.empty()) throw InvalidInput("forecast: empty h list");
  GapForecast f;
  f.k = k;
  f.omega_min = omega_min;
  f.nu_hat = nu_hat;
  f.k_levels = std::vector<double>(k_levels.begin(), k_levels.begin() + std::min<std::size_t>(k_levels.size(), n_gaps + 1));
  f.h_values = h_values;
  f.n_gaps = n_gaps;
  f.error_constant = error_constant;
  f.c_res = c_res;
  for (double h : h_values) {
    std::vector<double> z;
    for (double l : f.k_levels) z.push_back(quasimode_energy(h, k, omega_min, nu_hat, l));
    f.z.push_back(z);
    const auto [lo, hi] = ground_energy_bounds(h, k, omega_min, nu_hat, error_constant);
    f.lower.push_back(lo);
    f.upper.push_back(hi);
    f.gaps.push_back(gap_intervals(h, k, omega_min, nu_hat, k_levels, n_gaps, c_res));
    for (const auto& w : f.gaps.back().warnings) f.warnings.push_back(w);
  }
  return f;
}

nlohmann::json to_json(const GapForecast& f) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < f.h_values.size(); ++i) {
    nlohmann::json gaps = nlohmann::json::array();
    for (const auto& g : f.gaps[i].gaps) gaps.push_back({{"lo", g.lo}, {"hi", g.hi}, {"below", g.below}});
    rows.push_back({{"h", f.h_values[i]},
                    {"z", f.z[i]},
                    {"ground_lower", f.lower[i]},
                    {"ground_upper", f.upper[i]},
                    {"gaps", gaps}});
  }
  return {{"k", f.k},
          {"omega_min", f.omega_min},
          {"nu_hat", f.nu_hat},
          {"K_levels", f.k_levels},
          {"n_gaps", f.n_gaps},
          {"error_constant", f.error_constant},
          {"c_res", f.c_res},
          {"exponents",
           {{"leading", leading_exponent(f.k)},
            {"splitting", splitting_exponent(f.k)},
            {"bound", bound_exponent(f.k)},
            {"residual", residual_exponent(f.k)}}},
          {"rows", rows},
          {"warnings", f.warnings}};
}

std::string forecast_to_csv(const GapForecast& f) {
  std::vector<std::string> header{"h"};
  const std::size_t nz = f.k_levels.size();
  for (std::size_t m = 0; m < nz; ++m) header.push_back("z_" + std::to_string(m));
  for (int i = 0; i < f.n_gaps; ++i) {
    header.push_back("gap_lo_" + std::to_string(i));
    header.push_back("gap_hi_" + std::to_string(i));
  }
  CsvWriter csv(header);
  for (std::size_t r = 0; r < f.h_values.size(); ++r) {
    std::vector<std::string> row{format_number(f.h_values[r])};
    for (double z : f.z[r]) row.push_back(format_number(z));
    std::vector<std::string> gap_cells(2 * f.n_gaps);
    for (const auto& g : f.gaps[r].gaps) {
      if (g.below >= f.n_gaps) continue;
      gap_cells[2 * g.below] = format_number(g.lo);
      gap_cells[2 * g.below + 1] = format_number(g.hi);
    }
    row.insert(row.end(), gap_cells.begin(), gap_cells.end());
    csv.add_row(row);
  }
  return csv.str();
}

}  // namespace magwell
