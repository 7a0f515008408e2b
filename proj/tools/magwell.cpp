// magwell: batch front-end. Every run writes its outputs plus a manifest
// <name>.manifest.json into --out.

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "magwell/asymptotics.hpp"
#include "magwell/csv.hpp"
#include "magwell/errors.hpp"
#include "magwell/miniwell.hpp"
#include "magwell/model2d.hpp"
#include "magwell/montgomery.hpp"

#ifndef MAGWELL_VERSION
#define MAGWELL_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace magwell;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

std::vector<int> parse_k_list(const std::string& text) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      throw InvalidInput("bad k specification '" + text + "'");
    }
    if (used != s.size()) throw InvalidInput("bad k specification '" + text + "'");
    if (v < 1) throw InvalidInput("k must be >= 1 (got " + s + ")");
    return v;
  };
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(item));
    } else {
      const int lo = to_int(item.substr(0, dots));
      const int hi = to_int(item.substr(dots + 2));
      if (hi < lo) throw InvalidInput("empty k range '" + item + "'");
      for (int k = lo; k <= hi; ++k) out.push_back(k);
    }
  }
  if (out.empty()) throw InvalidInput("empty k specification");
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidInput("bad " + what + " entry '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v)) throw InvalidInput("bad " + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidInput("empty " + what + " list");
  return out;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidInput("range must be LO:HI, got '" + text + "'");
  const auto lo = parse_double_list(text.substr(0, colon), "range");
  const auto hi = parse_double_list(text.substr(colon + 1), "range");
  if (lo.size() != 1 || hi.size() != 1 || !(lo[0] < hi[0])) throw InvalidInput("range must be LO:HI with LO < HI");
  return {lo[0], hi[0]};
}

int worker_count() {
  const char* env = std::getenv("MAGWELL_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 256) throw InvalidInput("MAGWELL_WORKERS must be an integer in 1..256");
  return static_cast<int>(v);
}

/// Runs job(i) for i in [0, n) on a bounded pool; results stay in index order.
template <typename T>
std::vector<T> parallel_map(int n, int workers, const std::function<T(int)>& job) {
  std::vector<T> results(n);
  std::atomic<int> next{0};
  auto run = [&]() {
    for (int i = next++; i < n; i = next++) results[i] = job(i);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::min(workers, n); ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  return results;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Output {
 public:
  explicit Output(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::string write(const std::string& name, const std::string& contents) {
    const std::string path = (fs::path(dir_) / name).string();
    write_text_file(path, contents);
    files_.push_back(path);
    return path;
  }

  std::string write_json(const std::string& name, const json& j) { return write(name, j.dump(2) + "\n"); }

  void manifest(const std::string& name, const std::string& subcommand, const json& params) {
    json m{{"subcommand", subcommand},
           {"params", params},
           {"version", MAGWELL_VERSION},
           {"timestamp", utc_timestamp()},
           {"outputs", files_}};
    write_text_file((fs::path(dir_) / (name + ".manifest.json")).string(), m.dump(2) + "\n");
  }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

// ---------------------------------------------------------------- table1

int cmd_table1(const std::string& k_spec, double tol, const std::string& out_dir) {
  const auto ks = parse_k_list(k_spec);
  if (!(tol > 0.0)) throw InvalidInput("--tol must be positive");
  const int workers = worker_count();
  struct Row {
    bool ok = false;
    std::string error;
    MinimizerReport r;
  };
  const auto rows = parallel_map<Row>(static_cast<int>(ks.size()), workers, [&](int i) {
    Row row;
    try {
      row.r = minimize_alpha(ks[i], tol);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return row;
  });

  CsvWriter csv({"k", "alpha_min", "nu_hat", "lambda1", "lambda2", "d2", "d2_lower_bound", "hf_residual",
                 "norm_identity_residual", "condik_margin", "status"});
  json table = json::array();
  bool failed = false;
  std::cout << "  k   alpha_min   nu_hat   lambda1   |  hf_res    norm_res  condik\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (!row.ok) {
      failed = true;
      std::cerr << "k=" << ks[i] << ": " << row.error << "\n";
      csv.add_row(std::vector<std::string>{std::to_string(ks[i]), "", "", "", "", "", "", "", "", "", "error: " + row.error});
      table.push_back({{"k", ks[i]}, {"status", "error"}, {"error", row.error}});
      continue;
    }
    const auto& r = row.r;
    csv.add_row(std::vector<std::string>{std::to_string(r.k), format_number(r.alpha_min), format_number(r.nu_hat),
                                         format_number(r.lambda1), format_number(r.lambda2), format_number(r.d2),
                                         format_number(r.d2_lower_bound), format_number(r.hf_residual),
                                         format_number(r.norm_identity_residual), format_number(r.condik_margin),
                                         "ok"});
    json minima = json::array();
    for (const auto& m : r.local_minima_scan) minima.push_back({{"alpha", m.alpha}, {"lambda0", m.lambda0}});
    table.push_back({{"k", r.k},
                     {"alpha_min", r.alpha_min},
                     {"nu_hat", r.nu_hat},
                     {"lambda1", r.lambda1},
                     {"lambda2", r.lambda2},
                     {"d2", r.d2},
                     {"d2_lower_bound", r.d2_lower_bound},
                     {"hf_residual", r.hf_residual},
                     {"norm_identity_residual", r.norm_identity_residual},
                     {"condik_margin", r.condik_margin},
                     {"local_minima_scan", minima},
                     {"status", "ok"}});
    std::printf("%3d   %9s   %6s   %7s   |  %s  %s  %s\n", r.k, fixed(std::abs(r.alpha_min) < 5e-3 ? 0.0 : r.alpha_min, 2).c_str(),
                fixed(r.nu_hat, 2).c_str(), fixed(r.lambda1, 2).c_str(), sci(r.hf_residual).c_str(),
                sci(r.norm_identity_residual).c_str(), r.condik_holds ? "holds" : "FAILS");
  }
  Output out(out_dir);
  out.write("table1.csv", csv.str());
  out.write_json("table1.json", json{{"rows", table}, {"tol", tol}});
  out.manifest("table1", "table1", {{"k", ks}, {"tol", tol}, {"out", out_dir}});
  return failed ? kExitNumerical : kExitOk;
}

// ---------------------------------------------------------------- profile

int cmd_profile(int k, const std::string& range, int samples, double tol, const std::string& out_dir) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (samples < 2) throw InvalidInput("--samples must be at least 2");
  const auto [lo, hi] = parse_range(range);
  const auto report = minimize_alpha(k, std::max(tol, 1e-6));
  const auto table = profile(report, lo, hi, samples, tol);
  if (!table.contains_alpha_min) {
    std::cerr << "warning: range " << range << " excludes alpha_min = " << report.alpha_min << "\n";
  }
  Output out(out_dir);
  const std::string name = "profile_k" + std::to_string(k);
  out.write(name + ".csv", profile_to_csv(table));
  out.manifest(name, "profile",
               {{"k", k}, {"range", {lo, hi}}, {"samples", samples}, {"tol", tol}, {"out", out_dir},
                {"alpha_min", report.alpha_min}, {"nu_hat", report.nu_hat}, {"d2", report.d2}});
  std::cout << "k=" << k << " alpha_min=" << format_number(report.alpha_min) << " nu_hat=" << format_number(report.nu_hat)
            << " rows=" << table.rows.size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct Check {
  int k;
  std::string name;
  double value;
  double tolerance;
  bool pass;
  std::string detail;
};

std::vector<Check> verify_k(int k, double tol) {
  std::vector<Check> checks;
  const auto r = minimize_alpha(k, tol);
  const auto ids = verify_identities(r, 1e-5);
  checks.push_back({k, "lambda01", ids.lambda01_residual, 1e-5, ids.lambda01_residual < 1e-5,
                    "|int (p - alpha_min) u0^2|"});
  checks.push_back({k, "norm", ids.norm_residual, 1e-4, ids.norm_residual < 1e-4, "||(p - alpha_min) u0||^2 - nu/(k+2)"});
  const auto hf = hellmann_feynman_check(k, r.alpha_min + 0.25);
  checks.push_back({k, "hellmann_feynman", hf.residual, 1e-5, hf.residual < 1e-5,
                    "HF derivative vs finite differences at alpha_min + 0.25"});
  const auto v = nondegeneracy_check(r);
  checks.push_back({k, "condik", v.condik_margin, 0.0, v.condik_holds, "(k+2) lambda1 - (k+6) nu_hat > 0"});
  if (v.condik_odd_holds) {
    checks.push_back({k, "condik_odd", *v.condik_odd_margin, 0.0, *v.condik_odd_holds,
                      "(k+2) lambda2 - (k+6) nu_hat > 0"});
  }
  checks.push_back({k, "bound", r.d2 - v.bound, 1e-3, v.d2_above_bound, "d2 >= lower bound - 1e-3"});
  double worst_scaling = 0.0;
  for (const auto& [alpha, beta] : std::vector<std::pair<double, double>>{{0.7, 2.5}, {-1.1, 0.4}, {1.9, -1.7}}) {
    worst_scaling = std::max(worst_scaling, scaling_check({k, alpha, beta}).residual);
  }
  checks.push_back({k, "scaling", worst_scaling, 1e-8, worst_scaling < 1e-8, "3 (alpha, beta) pairs"});
  const auto parity = parity_check(k, r.alpha_min, 3);
  double worst_parity = 0.0;
  bool parity_ok = true;
  for (int m = 0; m < 4; ++m) {
    worst_parity = std::max(worst_parity, parity[m].residual);
    const Parity want = m % 2 == 0 ? Parity::Even : Parity::Odd;
    if (parity[m].parity != want) parity_ok = false;
  }
  checks.push_back({k, "parity", worst_parity, 1e-6, parity_ok && worst_parity < 1e-6, "u_m has parity (-1)^m, m=0..3"});
  return checks;
}

int cmd_verify(const std::string& k_spec, double tol, const std::string& out_dir) {
  const auto ks = parse_k_list(k_spec);
  const int workers = worker_count();
  struct Result {
    std::vector<Check> checks;
    std::string error;
  };
  const auto results = parallel_map<Result>(static_cast<int>(ks.size()), workers, [&](int i) {
    Result res;
    try {
      res.checks = verify_k(ks[i], tol);
    } catch (const std::exception& e) {
      res.error = e.what();
    }
    return res;
  });
  CsvWriter csv({"k", "check", "value", "tolerance", "pass"});
  json all = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].error.empty()) {
      ok = false;
      std::cerr << "k=" << ks[i] << ": " << results[i].error << "\n";
      csv.add_row(std::vector<std::string>{std::to_string(ks[i]), "error", "", "", "false"});
      all.push_back({{"k", ks[i]}, {"check", "error"}, {"detail", results[i].error}, {"pass", false}});
      continue;
    }
    for (const auto& c : results[i].checks) {
      ok = ok && c.pass;
      std::printf("%s k=%d %-17s value=%-12s tol=%s  %s\n", c.pass ? "PASS" : "FAIL", c.k, c.name.c_str(),
                  sci(c.value).c_str(), sci(c.tolerance).c_str(), c.detail.c_str());
      csv.add_row(std::vector<std::string>{std::to_string(c.k), c.name, format_number(c.value), format_number(c.tolerance),
                                           c.pass ? "true" : "false"});
      all.push_back({{"k", c.k}, {"check", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass},
                     {"detail", c.detail}});
    }
  }
  Output out(out_dir);
  out.write("verify.csv", csv.str());
  out.write_json("verify.json", json{{"checks", all}, {"all_pass", ok}});
  out.manifest("verify", "verify", {{"k", ks}, {"tol", tol}, {"out", out_dir}});
  return ok ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------- miniwell

json a_terms_json(const ATerms& t) {
  auto c = [](std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; };
  return {{"metric_normal", c(t.metric_normal)},
          {"divergence", c(t.divergence)},
          {"omega02", c(t.omega02)},
          {"metric_tangential", c(t.metric_tangential)}};
}

int cmd_miniwell(const std::string& geometry_path, int k, int count, double tol, const std::string& out_dir) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (count < 1) throw InvalidInput("--count must be positive");
  const auto geom = load_geometry(geometry_path);
  const auto report = minimize_alpha(k, tol);
  const auto moments = converged_moments(k, report.alpha_min);
  const auto K = build_K(geom, report, moments);
  const auto spec = spectrum_K(K, count);
  if (spec.imag_A_warning) {
    std::cerr << "warning: Im(A) = " << K.A_const.imag() << " is not negligible; levels use Re(A)\n";
  }
  json j{{"geometry", to_json(geom)},
         {"k", k},
         {"alpha_min", report.alpha_min},
         {"nu_hat", report.nu_hat},
         {"d2", report.d2},
         {"moments", {{"m_tau_upp", moments.m_tau_upp}, {"m_mixed", moments.m_mixed}, {"m_tau_sq", moments.m_tau_sq}}},
         {"A_terms", a_terms_json(build_A_terms(geom, k, report, moments))},
         {"K", to_json(K)},
         {"spectrum", to_json(spec)}};
  Output out(out_dir);
  out.write_json("miniwell.json", j);
  out.manifest("miniwell", "miniwell",
               {{"geometry", geometry_path}, {"k", k}, {"count", count}, {"tol", tol}, {"out", out_dir}});
  std::cout << "branch=" << to_string(spec.branch);
  if (spec.branch == KSpectrum::Branch::Nondegenerate) {
    std::cout << " levels:";
    for (double l : spec.levels) std::cout << " " << format_number(l);
  } else {
    std::cout << " bottom=" << format_number(spec.bottom) << " (half-line spectrum)";
  }
  std::cout << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- predict

int cmd_predict(const std::string& geometry_path, const std::string& h_spec, int k, int n_gaps, double c_bound,
                double c_res, const std::string& levels_spec, double tol, const std::string& out_dir) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (n_gaps < 1) throw InvalidInput("--gaps must be >= 1");
  const auto h_values = parse_double_list(h_spec, "h");
  for (double h : h_values) {
    if (!(h > 0.0)) throw InvalidInput("h values must be positive");
  }
  const auto geom = load_geometry(geometry_path);
  const auto report = minimize_alpha(k, tol);
  const auto moments = converged_moments(k, report.alpha_min);
  const auto K = build_K(geom, report, moments);
  const auto spec = spectrum_K(K, n_gaps + 1);
  if (spec.imag_A_warning) {
    std::cerr << "warning: Im(A) = " << K.A_const.imag() << " is not negligible; levels use Re(A)\n";
  }
  std::vector<double> k_levels;
  if (spec.branch == KSpectrum::Branch::Nondegenerate) {
    k_levels = spec.levels;
  } else {
    if (levels_spec.empty()) {
      throw InvalidInput("degenerate branch: the spectrum is a half-line; pass --levels with N+1 chosen values");
    }
    k_levels = parse_double_list(levels_spec, "levels");
    if (static_cast<int>(k_levels.size()) < n_gaps + 1) throw InvalidInput("--levels needs N+1 values");
    if (k_levels.front() < spec.bottom) throw InvalidInput("--levels must lie in the spectrum [bottom, inf)");
  }
  const auto forecast = make_forecast(k, geom.omega_min(), report.nu_hat, k_levels, h_values, n_gaps, c_bound, c_res);
  for (const auto& w : forecast.warnings) std::cerr << "warning: " << w << "\n";
  Output out(out_dir);
  json j = to_json(forecast);
  j["branch"] = to_string(spec.branch);
  out.write_json("forecast.json", j);
  out.write("forecast.csv", forecast_to_csv(forecast));
  out.manifest("forecast", "predict",
               {{"geometry", geometry_path}, {"h", h_values}, {"k", k}, {"gaps", n_gaps}, {"C", c_bound},
                {"c_res", c_res}, {"levels", k_levels}, {"tol", tol}, {"out", out_dir}});
  std::cout << "forecast for " << h_values.size() << " h values, " << n_gaps << " gaps\n";
  return kExitOk;
}

// ---------------------------------------------------------------- validate2d

int cmd_validate2d(const std::string& config_path, bool export_matrix, const std::string& out_dir) {
  const auto config = load_config(config_path);
  const int workers = worker_count();
  const auto report = minimize_alpha(config.k, 1e-6);
  const auto sweep = run_sweep(config, report, workers);
  for (const auto& w : sweep.warnings) std::cerr << "warning: " << w << "\n";
  Output out(out_dir);
  out.write_json("sweep.json", to_json(sweep));
  out.write("sweep.csv", sweep_to_csv(sweep));
  if (export_matrix) {
    const double h = config.effective_h_list().front();
    out.write("matrix_h0.mtx", export_coo(assemble_2d(config, h)));
  }
  out.manifest("sweep", "validate2d", {{"config", config_path}, {"resolved_config", to_json(config)},
                                       {"export_matrix", export_matrix}, {"out", out_dir}});
  std::cout << "leading exponent " << format_number(sweep.leading_fit.exponent) << " (expected "
            << format_number(leading_exponent(config.k)) << ")";
  if (sweep.splitting_fit) {
    std::cout << ", splitting exponent " << format_number(sweep.splitting_fit->exponent) << " (expected "
              << format_number(splitting_exponent(config.k)) << ")";
  }
  std::cout << ", lambda0 ratio " << format_number(sweep.leading_ratio) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for magnetic wells vanishing on a hypersurface"};
  app.set_version_flag("--version", std::string(MAGWELL_VERSION));
  app.require_subcommand(1);
  std::string out_dir = "out";
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string k_spec = "1..7";
  double tol = 1e-4;
  auto* t1 = app.add_subcommand("table1", "Band minimum, nu_hat and lambda1 for a range of k");
  t1->add_option("--k", k_spec, "k list, e.g. 1..7 or 1,3")->capture_default_str();
  t1->add_option("--tol", tol, "Tolerance")->capture_default_str();

  int k = 1;
  std::string range = "-2:3";
  int samples = 201;
  double profile_tol = 1e-7;
  auto* pr = app.add_subcommand("profile", "Band function lambda0(alpha, 1) and its quadratic model");
  pr->add_option("--k", k, "Vanishing order")->required();
  pr->add_option("--range", range, "alpha range LO:HI")->capture_default_str();
  pr->add_option("--samples", samples, "Number of alpha samples")->capture_default_str();
  pr->add_option("--tol", profile_tol, "Eigenvalue tolerance")->capture_default_str();

  std::string verify_k_spec = "1..7";
  double verify_tol = 1e-4;
  auto* ve = app.add_subcommand("verify", "Pass/fail report over the band-function identities");
  ve->add_option("--k", verify_k_spec, "k list")->capture_default_str();
  ve->add_option("--tol", verify_tol, "Minimizer tolerance")->capture_default_str();

  std::string geometry;
  int mw_k = 1;
  int count = 10;
  double mw_tol = 1e-6;
  auto* mw = app.add_subcommand("miniwell", "Effective operator K and its spectrum");
  mw->add_option("--geometry", geometry, "Geometry JSON")->required();
  mw->add_option("--k", mw_k, "Vanishing order")->capture_default_str();
  mw->add_option("--count", count, "Number of levels")->capture_default_str();
  mw->add_option("--tol", mw_tol, "Minimizer tolerance")->capture_default_str();

  std::string pd_geometry, h_spec, levels_spec;
  int pd_k = 1;
  int n_gaps = 3;
  double c_bound = 1.0, c_res = 1.0, pd_tol = 1e-6;
  auto* pd = app.add_subcommand("predict", "Quasimode energies, ground bounds and gap windows");
  pd->set_help_flag("--help", "Print this help message and exit");
  pd->add_option("--geometry", pd_geometry, "Geometry JSON")->required();
  pd->add_option("--h", h_spec, "Comma-separated h values")->required();
  pd->add_option("--k", pd_k, "Vanishing order")->capture_default_str();
  pd->add_option("--gaps", n_gaps, "Number of gaps N")->capture_default_str();
  pd->add_option("--C", c_bound, "Ground-bound constant")->capture_default_str();
  pd->add_option("--c-res", c_res, "Residual margin constant")->capture_default_str();
  pd->add_option("--levels", levels_spec, "Chosen K levels (degenerate branch)");
  pd->add_option("--tol", pd_tol, "Minimizer tolerance")->capture_default_str();

  std::string config_path;
  bool export_matrix = false;
  auto* v2 = app.add_subcommand("validate2d", "h-sweep of the discretized 2D operator");
  v2->add_option("--config", config_path, "Sweep configuration JSON")->required();
  v2->add_flag("--export-matrix", export_matrix, "Also write the largest-h matrix in coordinate format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*t1) return cmd_table1(k_spec, tol, out_dir);
    if (*pr) return cmd_profile(k, range, samples, profile_tol, out_dir);
    if (*ve) return cmd_verify(verify_k_spec, verify_tol, out_dir);
    if (*mw) return cmd_miniwell(geometry, mw_k, count, mw_tol, out_dir);
    if (*pd) return cmd_predict(pd_geometry, h_spec, pd_k, n_gaps, c_bound, c_res, levels_spec, pd_tol, out_dir);
    if (*v2) return cmd_validate2d(config_path, export_matrix, out_dir);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
