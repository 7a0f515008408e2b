#include "magwell/model2d.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "magwell/csv.hpp"
#include "magwell/errors.hpp"
#include "magwell/sl_engine.hpp"
#include "magwell/sparse_eigs.hpp"

namespace magwell {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double Field2DConfig::omega(double s) const {
  if (profile == "constant") return omega_min;
  const double x = std::sin(kPi * (s - s1) / S);
  return omega_min * (1.0 + a * x * x);
}

double Field2DConfig::phi(double s) const {
  return gauge_amplitude * std::sin(2.0 * kPi * gauge_mode * s / S);
}

double Field2DConfig::abs2_curvature() const {
  if (profile == "constant") return 0.0;
  return 4.0 * kPi * kPi * a * omega_min * omega_min / (S * S);
}

double Field2DConfig::magnetic_length(double h) const {
  return std::pow(h, 1.0 / (k + 2)) * std::pow(omega_min, -1.0 / (k + 2));
}

double Field2DConfig::half_width(double h) const { return T > 0.0 ? T : t_half_width_lengths * magnetic_length(h); }

int Field2DConfig::required_n_t(double h) const {
  return static_cast<int>(std::ceil(20.0 * half_width(h) / magnetic_length(h) - 1e-9));
}

int Field2DConfig::required_n_s(double h) const {
  return static_cast<int>(std::ceil(20.0 * S / std::pow(h, 1.0 / (2.0 * (k + 2))) - 1e-9));
}

double Field2DConfig::smallest_resolved_h() const {
  // n_s >= 20 S h^{-1/(2(k+2))}
  double h_s = std::pow(20.0 * S / n_s, 2.0 * (k + 2));
  double h_t = 0.0;
  if (T > 0.0) h_t = omega_min * std::pow(20.0 * T / n_t, k + 2);  // l(h) >= 20 T / n_t
  return std::max(h_s, h_t);
}

std::vector<double> Field2DConfig::effective_h_list() const {
  if (!h_list.empty()) return h_list;
  const double lo = std::max(smallest_resolved_h(), 1e-3);
  std::vector<double> out;
  const int n = 8;
  for (int i = 0; i < n; ++i) out.push_back(0.1 * std::pow(lo / 0.1, static_cast<double>(i) / (n - 1)));
  return out;
}

void Field2DConfig::validate() const {
  if (k < 1) throw InvalidInput("config: k must be >= 1");
  if (profile != "sin2" && profile != "constant") throw InvalidInput("config: profile must be 'sin2' or 'constant'");
  if (!(omega_min > 0.0)) throw InvalidInput("config: omega_min must be positive");
  if (profile == "sin2" && !(a > 0.0)) throw InvalidInput("config: a must be positive for a non-degenerate miniwell");
  if (!(S > 0.0)) throw InvalidInput("config: S must be positive");
  if (T < 0.0 || !(t_half_width_lengths > 0.0)) throw InvalidInput("config: t half width must be positive");
  if (n_s < 8 || n_t < 8) throw InvalidInput("config: n_s and n_t must be at least 8");
  if (levels < 1) throw InvalidInput("config: levels must be >= 1");
  if (!(tol > 0.0)) throw InvalidInput("config: tol must be positive");
  if (c_res < 0.0) throw InvalidInput("config: c_res must be non-negative");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0)) throw InvalidInput("config: h values must be positive");
    if (i > 0 && !(h_list[i] < h_list[i - 1])) throw InvalidInput("config: h_list must be strictly descending");
  }
}

Field2DConfig config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "k",      "profile",   "omega_min",   "a",        "s1",           "S",          "T",
      "t_half_width_lengths", "n_s",       "n_t",      "h_list",       "levels",     "tol",
      "check_resolution", "zero_gauge", "gauge_amplitude", "gauge_mode", "c_res", "calibration_points"};
  if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidInput("config: unknown field '" + key + "'");
  }
  Field2DConfig c;
  try {
    c.k = j.value("k", c.k);
    c.profile = j.value("profile", c.profile);
    c.omega_min = j.value("omega_min", c.omega_min);
    c.a = j.value("a", c.a);
    c.s1 = j.value("s1", c.s1);
    c.S = j.value("S", c.S);
    c.T = j.value("T", c.T);
    c.t_half_width_lengths = j.value("t_half_width_lengths", c.t_half_width_lengths);
    c.n_s = j.value("n_s", c.n_s);
    c.n_t = j.value("n_t", c.n_t);
    c.h_list = j.value("h_list", c.h_list);
    c.levels = j.value("levels", c.levels);
    c.tol = j.value("tol", c.tol);
    c.check_resolution = j.value("check_resolution", c.check_resolution);
    c.zero_gauge = j.value("zero_gauge", c.zero_gauge);
    c.gauge_amplitude = j.value("gauge_amplitude", c.gauge_amplitude);
    c.gauge_mode = j.value("gauge_mode", c.gauge_mode);
    c.c_res = j.value("c_res", c.c_res);
    c.calibration_points = j.value("calibration_points", c.calibration_points);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

Field2DConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("config file '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json to_json(const Field2DConfig& c) {
  return {{"k", c.k},
          {"profile", c.profile},
          {"omega_min", c.omega_min},
          {"a", c.a},
          {"s1", c.s1},
          {"S", c.S},
          {"T", c.T},
          {"t_half_width_lengths", c.t_half_width_lengths},
          {"n_s", c.n_s},
          {"n_t", c.n_t},
          {"h_list", c.effective_h_list()},
          {"levels", c.levels},
          {"tol", c.tol},
          {"check_resolution", c.check_resolution},
          {"zero_gauge", c.zero_gauge},
          {"gauge_amplitude", c.gauge_amplitude},
          {"gauge_mode", c.gauge_mode},
          {"c_res", c.c_res},
          {"calibration_points", c.calibration_points}};
}

Operator2D assemble_2d(const Field2DConfig& config, double h) {
  config.validate();
  if (!(h > 0.0)) throw InvalidInput("assemble_2d: h must be positive");
  if (config.check_resolution) {
    const int need_t = config.required_n_t(h);
    const int need_s = config.required_n_s(h);
    if (config.n_t < need_t || config.n_s < need_s) {
      std::ostringstream msg;
      msg << "assemble_2d: grid under-resolves the magnetic length at h=" << format_number(h) << ": need n_t >= "
          << need_t << " (have " << config.n_t << ") and n_s >= " << need_s << " (have " << config.n_s << ")";
      throw InvalidInput(msg.str());
    }
  }
  Operator2D op;
  op.h = h;
  op.n_s = config.n_s;
  op.n_t = config.n_t;
  op.T = config.half_width(h);
  op.dt = 2.0 * op.T / (op.n_t + 1);
  op.ds = config.S / op.n_s;
  const double ct = h * h / (op.dt * op.dt);
  const double cs = h * h / (op.ds * op.ds);
  const int k = config.k;

  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(op.n_s) * op.n_t * 5);
  for (int j = 0; j < op.n_s; ++j) {
    const int jn = (j + 1) % op.n_s;
    const double s_mid = (j + 0.5) * op.ds;
    const double w_mid = config.omega(s_mid);
    const double gauge = (config.phi((j + 1) * op.ds) - config.phi(j * op.ds)) / h;
    for (int i = 0; i < op.n_t; ++i) {
      const double t = -op.T + (i + 1) * op.dt;
      const int p = op.index(j, i);
      trip.emplace_back(p, p, 2.0 * ct + 2.0 * cs);
      if (i + 1 < op.n_t) {
        trip.emplace_back(p, op.index(j, i + 1), -ct);
        trip.emplace_back(op.index(j, i + 1), p, -ct);
      }
      // Link (j, j+1): phase of the line integral of A_s / h.
      double theta = gauge;
      if (!config.zero_gauge) theta += std::pow(t, k + 1) / (k + 1) * w_mid * op.ds / h;
      const cplx link = -cs * cplx(std::cos(theta), -std::sin(theta));
      const int q = op.index(jn, i);
      trip.emplace_back(p, q, link);
      trip.emplace_back(q, p, std::conj(link));
    }
  }
  op.H.resize(op.n_s * op.n_t, op.n_s * op.n_t);
  op.H.setFromTriplets(trip.begin(), trip.end());
  op.H.makeCompressed();
  return op;
}

Eigen2D lowest_eigenvalues_2d(const Operator2D& op, int m_count, double tol, std::optional<double> shift) {
  SparseEigenOptions opt;
  opt.tol = tol;
  opt.shift = shift;
  opt.max_iterations = 3000;
  const auto res = lowest_eigenpairs_sparse(op.H, m_count, opt);
  return {res.values, res.residuals, res.iterations};
}

std::vector<double> zero_gauge_eigenvalues(const Field2DConfig& config, double h, int count) {
  const double T = config.half_width(h);
  const double dt = 2.0 * T / (config.n_t + 1);
  const double ds = config.S / config.n_s;
  std::vector<double> all;
  for (int p = 1; p <= config.n_t; ++p) {
    const double et = 4.0 / (dt * dt) * std::pow(std::sin(kPi * p / (2.0 * (config.n_t + 1))), 2);
    for (int q = 0; q < config.n_s; ++q) {
      const double es = 4.0 / (ds * ds) * std::pow(std::sin(kPi * q / config.n_s), 2);
      all.push_back(h * h * (et + es));
    }
  }
  std::sort(all.begin(), all.end());
  all.resize(std::min<std::size_t>(all.size(), count));
  return all;
}

std::vector<double> fiber_eigenvalues(const Field2DConfig& config, double h, int count) {
  if (config.profile != "constant") throw InvalidInput("fiber_eigenvalues: needs an s-independent omega");
  const double T = config.half_width(h);
  const double ds = config.S / config.n_s;
  const Grid1D grid(T, config.n_t + 2);
  const int k = config.k;
  std::vector<double> all;
  for (int q = 0; q < config.n_s; ++q) {
    const double xi = 2.0 * kPi * q / config.n_s;
    // Fiber potential divided by h^2 so the 1D engine's -d^2/dt^2 matches.
    Potential v = [&, xi](double t) {
      const double theta = config.zero_gauge ? 0.0 : std::pow(t, k + 1) / (k + 1) * config.omega_min * ds / h;
      return (2.0 - 2.0 * std::cos(xi - theta)) / (ds * ds);
    };
    const auto spec = lowest_eigenpairs(assemble(v, grid), std::min(count, config.n_t), 1e-14);
    for (double e : spec.eigenvalues) all.push_back(h * h * e);
  }
  std::sort(all.begin(), all.end());
  all.resize(std::min<std::size_t>(all.size(), count));
  return all;
}

std::string export_coo(const Operator2D& op) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << "% h=" << format_number(op.h) << " n_s=" << op.n_s << " n_t=" << op.n_t << " T=" << format_number(op.T)
      << " index=j*n_t+i\n";
  out << op.H.rows() << " " << op.H.cols() << " " << op.H.nonZeros() << "\n";
  for (int col = 0; col < op.H.outerSize(); ++col) {
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(op.H, col); it; ++it) {
      out << it.row() + 1 << " " << it.col() + 1 << " " << format_number(it.value().real()) << " "
          << format_number(it.value().imag()) << "\n";
    }
  }
  return out.str();
}

Sweep2DReport run_sweep(const Field2DConfig& config, const MinimizerReport& report, int workers) {
  config.validate();
  if (report.k != config.k) throw InvalidInput("run_sweep: minimizer report is for a different k");
  const int k = config.k;
  Sweep2DReport out;
  out.config = config;
  out.nu_hat = report.nu_hat;
  out.alpha_min = report.alpha_min;
  out.d2 = report.d2;
  out.leading_limit = report.nu_hat * std::pow(config.omega_min, 2.0 / (k + 2));
  const auto h_values = config.effective_h_list();
  if (config.h_list.empty() && config.smallest_resolved_h() > 1e-3) {
    out.warnings.push_back("default h list truncated at " + format_number(h_values.back()) +
                           " by the resolution rule at this grid");
  }

  if (config.profile == "sin2" && !config.zero_gauge) {
    const auto geom = MiniwellGeometry::flat_2d(config.omega_min, config.abs2_curvature());
    const auto K = build_K(geom, report, Moments1D{});
    out.k_levels = spectrum_K(K, config.levels).levels;
    out.has_miniwell = true;
  }

  out.rows.resize(h_values.size());
  std::vector<std::exception_ptr> errors(h_values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < h_values.size(); i = next++) {
      try {
        const double h = h_values[i];
        const Operator2D op = assemble_2d(config, h);
        const double guess = 0.9 * out.leading_limit * std::pow(h, leading_exponent(k));
        const auto eig = lowest_eigenvalues_2d(op, config.levels, config.tol,
                                               config.zero_gauge ? std::nullopt : std::optional<double>(guess));
        Sweep2DRow row;
        row.h = h;
        row.T = op.T;
        row.lambda = eig.values;
        row.residuals = eig.residuals;
        row.iterations = eig.iterations;
        for (int m = 0; m < config.levels; ++m) {
          const double lm = out.has_miniwell ? out.k_levels[m] : 0.0;
          row.z.push_back(quasimode_energy(h, k, config.omega_min, report.nu_hat, lm));
        }
        if (out.has_miniwell) {
          const double lead = out.leading_limit * std::pow(h, leading_exponent(k));
          const double corr = out.k_levels[0] * std::pow(h, splitting_exponent(k));
          row.pre_asymptotic = lead < 10.0 * corr;
        }
        out.rows[i] = std::move(row);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(h_values.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (const auto& row : out.rows) {
    if (row.pre_asymptotic) {
      out.warnings.push_back("h=" + format_number(row.h) +
                             " is outside the asymptotic regime (leading term < 10x correction)");
    }
  }

  std::vector<double> hs, l0, split;
  for (const auto& row : out.rows) {
    hs.push_back(row.h);
    l0.push_back(row.lambda[0]);
    if (config.levels > 1) split.push_back(row.lambda[1] - row.lambda[0]);
  }
  const double hmin = *std::min_element(hs.begin(), hs.end());
  const double hmax = *std::max_element(hs.begin(), hs.end());
  const bool fittable = hs.size() >= 4 && hmax / hmin >= 10.0 * (1.0 - 1e-12);
  if (fittable) {
    out.leading_fit = exponent_fit(hs, l0);
    if (config.levels > 1) out.splitting_fit = exponent_fit(hs, split);
  } else {
    out.warnings.push_back("h list too short for exponent fits (need 4 values over a decade)");
  }

  const auto smallest =
      std::min_element(out.rows.begin(), out.rows.end(), [](const auto& a, const auto& b) { return a.h < b.h; });
  out.leading_ratio = smallest->lambda[0] / std::pow(smallest->h, leading_exponent(k)) / out.leading_limit;
  for (int m = 0; m + 1 < config.levels; ++m) {
    out.splitting_measured.push_back((smallest->lambda[m + 1] - smallest->lambda[m]) /
                                     std::pow(smallest->h, splitting_exponent(k)));
    if (out.has_miniwell) out.splitting_predicted.push_back(out.k_levels[m + 1] - out.k_levels[m]);
  }

  if (out.has_miniwell) {
    // Band constant from the largest-h rows, then checked on every row.
    std::vector<std::size_t> order(out.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out.rows[a].h > out.rows[b].h; });
    const int n_cal = config.calibration_points > 0
                          ? std::min<int>(config.calibration_points, static_cast<int>(order.size()))
                          : std::max<int>(1, static_cast<int>(order.size()) / 2);
    const double rexp = residual_exponent(k);
    auto band_ratio = [&](const Sweep2DRow& row) {
      double worst = 0.0;
      for (int m = 0; m < config.levels; ++m) worst = std::max(worst, std::abs(row.lambda[m] - row.z[m]) / std::pow(row.h, rexp));
      return worst;
    };
    for (int c = 0; c < n_cal; ++c) out.band_constant = std::max(out.band_constant, band_ratio(out.rows[order[c]]));
    out.band_holds = true;
    out.gaps_clear = true;
    for (const auto& row : out.rows) {
      if (band_ratio(row) > out.band_constant) out.band_holds = false;
      if (config.levels < 2) continue;
      const auto gaps =
          gap_intervals(row.h, k, config.omega_min, report.nu_hat, out.k_levels, config.levels - 1, out.band_constant);
      for (const auto& w : gaps.warnings) out.warnings.push_back(w);
      for (const auto& g : gaps.gaps) {
        ++out.gap_count;
        for (double l : row.lambda) {
          if (l > g.lo && l < g.hi) out.gaps_clear = false;
        }
      }
    }
    if (out.gap_count == 0) out.gaps_clear = false;
  }
  return out;
}

nlohmann::json to_json(const Sweep2DReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"h", row.h},
                    {"T", row.T},
                    {"lambda", row.lambda},
                    {"z", row.z},
                    {"residuals", row.residuals},
                    {"iterations", row.iterations},
                    {"pre_asymptotic", row.pre_asymptotic}});
  }
  auto fit_json = [](const ExponentFit& f) {
    return nlohmann::json{{"exponent", f.exponent}, {"coefficient", f.coefficient}, {"r2", f.r2}, {"samples", f.samples}};
  };
  nlohmann::json j{{"config", to_json(r.config)},
                   {"nu_hat", r.nu_hat},
                   {"alpha_min", r.alpha_min},
                   {"d2", r.d2},
                   {"has_miniwell", r.has_miniwell},
                   {"K_levels", r.k_levels},
                   {"rows", rows},
                   {"leading_fit", fit_json(r.leading_fit)},
                   {"expected_leading_exponent", leading_exponent(r.config.k)},
                   {"expected_splitting_exponent", splitting_exponent(r.config.k)},
                   {"leading_limit", r.leading_limit},
                   {"leading_ratio", r.leading_ratio},
                   {"splitting_measured", r.splitting_measured},
                   {"splitting_predicted", r.splitting_predicted},
                   {"band_constant", r.band_constant},
                   {"band_holds", r.band_holds},
                   {"gaps_clear", r.gaps_clear},
                   {"gap_count", r.gap_count},
                   {"warnings", r.warnings}};
  if (r.splitting_fit) j["splitting_fit"] = fit_json(*r.splitting_fit);
  return j;
}

std::string sweep_to_csv(const Sweep2DReport& r) {
  std::vector<std::string> header{"h"};
  const int m = r.config.levels;
  for (int i = 0; i < m; ++i) header.push_back("lambda_" + std::to_string(i));
  for (int i = 0; i < m; ++i) header.push_back("z_" + std::to_string(i));
  CsvWriter csv(header);
  for (const auto& row : r.rows) {
    std::vector<double> v{row.h};
    v.insert(v.end(), row.lambda.begin(), row.lambda.end());
    v.insert(v.end(), row.z.begin(), row.z.end());
    csv.add_row(v);
  }
  return csv.str();
}

}  // namespace magwell
