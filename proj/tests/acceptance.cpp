// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <stdexcept>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "magwell/asymptotics.hpp"
#include "magwell/miniwell.hpp"
#include "magwell/model2d.hpp"
#include "magwell/montgomery.hpp"

using namespace magwell;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& what) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void detail(const char* fmt, auto... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct TableRow {
  int k;
  double alpha_min, nu_hat, lambda1;
};

constexpr TableRow kTable[] = {{1, 0.35, 0.57, 1.98}, {2, 0.0, 0.66, 2.50}, {3, 0.16, 0.68, 2.61},
                               {4, 0.0, 0.76, 2.98},  {5, 0.10, 0.81, 3.18}, {6, 0.0, 0.87, 3.47},
                               {7, 0.07, 0.92, 3.66}};

std::vector<MinimizerReport> reports;

void criterion_table() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& row : kTable) {
    const auto r = minimize_alpha(row.k, 1e-4);
    const double dev = std::max({std::abs(r.alpha_min - row.alpha_min), std::abs(r.nu_hat - row.nu_hat),
                                 std::abs(r.lambda1 - row.lambda1)});
    worst = std::max(worst, dev);
    detail("k=%d alpha_min=%.4f nu_hat=%.4f lambda1=%.4f  max deviation %.4f", row.k, r.alpha_min, r.nu_hat,
           r.lambda1, dev);
  }
  const double elapsed = seconds_since(t0);
  char buf[512];
  std::snprintf(buf, sizeof buf, "reference band-minimum values for k=1..7, worst deviation %.4f (<= 0.01), %.1f s (< 60 s)", worst,
                elapsed);
  verdict(1, worst <= 0.01 && elapsed < 60.0, buf);
}

void criterion_identities() {
  double w01 = 0, wnorm = 0, whf = 0;
  for (int k = 1; k <= 7; ++k) {
    const auto id = verify_identities(reports[k - 1], 1e-5);
    const auto hf = hellmann_feynman_check(k, reports[k - 1].alpha_min + 0.25);
    w01 = std::max(w01, id.lambda01_residual);
    wnorm = std::max(wnorm, id.norm_residual);
    whf = std::max(whf, hf.residual);
    detail("k=%d lambda01=%.2e norm=%.2e hf-fd=%.2e", k, id.lambda01_residual, id.norm_residual, hf.residual);
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "identities, worst lambda01 %.2e (< 1e-5), norm %.2e (< 1e-4), HF vs FD %.2e (< 1e-5)",
                w01, wnorm, whf);
  verdict(2, w01 < 1e-5 && wnorm < 1e-4 && whf < 1e-5, buf);
}

void criterion_condik() {
  bool ok = true;
  double min_margin = 1e300, min_slack = 1e300;
  for (const auto& r : reports) {
    const auto v = nondegeneracy_check(r);
    ok = ok && v.condik_holds && v.condik_margin > 0.0 && r.d2 >= v.bound - 1e-3;
    min_margin = std::min(min_margin, v.condik_margin);
    min_slack = std::min(min_slack, r.d2 - v.bound);
    detail("k=%d margin=%.4f d2=%.5f bound=%.5f", r.k, v.condik_margin, r.d2, v.bound);
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "non-degeneracy, smallest margin %.4g (> 0), smallest d2 - bound %.4g (>= -1e-3)",
                min_margin, min_slack);
  verdict(3, ok, buf);
}

void criterion_scaling() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> K(1, 7);
  std::uniform_real_distribution<double> A(-1.5, 2.5), LB(std::log(0.1), std::log(10.0));
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto c = scaling_check({K(rng), A(rng), std::exp(LB(rng))});
    worst = std::max(worst, c.residual);
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "scaling law on 50 random (k, alpha, beta), worst residual %.2e (< 1e-8), %.1f s",
                worst, seconds_since(t0));
  verdict(4, worst < 1e-8, buf);
}

void criterion_parity() {
  bool ok = true;
  double worst = 0.0;
  for (int k : {1, 3, 5, 7}) {
    const auto p = parity_check(k, reports[k - 1].alpha_min, 3);
    for (int m = 0; m < 4; ++m) {
      ok = ok && p[m].parity == (m % 2 == 0 ? Parity::Even : Parity::Odd) && p[m].residual < 1e-6;
      worst = std::max(worst, p[m].residual);
    }
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "odd-k parity (-1)^m for m=0..3, worst residual %.2e (< 1e-6)", worst);
  verdict(5, ok, buf);
}

void criterion_k_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(-1.0, 1.0), C(0.3, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int d = i < 3 ? 1 : 2;
    Eigen::MatrixXd B(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) B(a, b) = U(rng);
    EffectiveOperatorK K;
    K.Omega = B * B.transpose() + 0.2 * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd e(d);
    for (int a = 0; a < d; ++a) e[a] = U(rng);
    K.e_omega = e.normalized();
    K.c_omega = C(rng);
    K.A_const = U(rng);
    const int count = 4;
    const auto closed = spectrum_K(K, count);
    const auto fd = spectrum_K_oracle(K, count);
    double dev = 0.0;
    for (int m = 0; m < count; ++m) dev = std::max(dev, std::abs(closed.levels[m] - fd.levels[m]));
    worst = std::max(worst, dev);
    detail("case %d (n-1=%d, c=%.3f): max |closed - oracle| = %.2e", i, d, K.c_omega, dev);
  }

  const auto g = load_geometry(std::string(MAGWELL_SOURCE_DIR) + "/configs/geometry_curved_3d.json");
  const auto moments = converged_moments(1, reports[0].alpha_min);
  const auto base = spectrum_K(build_K(g, reports[0], moments), 10);
  double rot = 0.0;
  for (double th : {0.4, 1.7, 2.6, 5.0}) {
    Eigen::Matrix2d R;
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    auto h = g;
    h.omega01 = R * g.omega01;
    h.domega01 = R * g.domega01 * R.transpose();
    h.hess_abs2 = R * g.hess_abs2 * R.transpose();
    h.omega02 = R * g.omega02;
    h.gdot0j = R * g.gdot0j;
    h.gdotjl = R * g.gdotjl * R.transpose();
    h.gammaj0 = R * g.gammaj0;
    const auto s = spectrum_K(build_K(h, reports[0], moments), 10);
    for (int m = 0; m < 10; ++m) rot = std::max(rot, std::abs(s.levels[m] - base.levels[m]));
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "K closed form vs discretization on 10 random SPD cases, worst %.2e (< 1e-4); "
                "rotation invariance %.2e (< 1e-10)", worst, rot);
  verdict(6, worst < 1e-4 && rot < 1e-10, buf);
}

void criteria_2d() {
  const auto config = load_config(std::string(MAGWELL_SOURCE_DIR) + "/configs/validate2d_k1.json");
  const auto t0 = std::chrono::steady_clock::now();
  const int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto rep = run_sweep(config, minimize_alpha(1, 1e-8), workers);
  const double elapsed = seconds_since(t0);
  for (const auto& row : rep.rows) {
    detail("h=%.6g lambda0=%.10g lambda1=%.10g lambda2=%.10g lambda3=%.10g", row.h, row.lambda[0], row.lambda[1],
           row.lambda[2], row.lambda[3]);
  }
  const double lead_dev = rep.leading_fit.exponent / leading_exponent(1) - 1.0;
  const double ratio_dev = rep.leading_ratio - 1.0;
  const double split_dev = rep.splitting_fit ? rep.splitting_fit->exponent / splitting_exponent(1) - 1.0 : 1e300;
  double gap_dev = 0.0;
  for (std::size_t m = 0; m < rep.splitting_measured.size(); ++m) {
    const double dev = rep.splitting_measured[m] / rep.splitting_predicted[m] - 1.0;
    gap_dev = std::max(gap_dev, std::abs(dev));
    detail("splitting %zu: measured %.5f, K gap %.5f, deviation %+.2f%%", m, rep.splitting_measured[m],
           rep.splitting_predicted[m], 100 * dev);
  }
  detail("leading exponent %.5f (%+.2f%%), lambda0/h^(4/3) over limit %.5f (%+.2f%%), splitting exponent %.5f "
         "(%+.2f%%), sweep %.0f s on %dx%d",
         rep.leading_fit.exponent, 100 * lead_dev, rep.leading_ratio, 100 * ratio_dev,
         rep.splitting_fit ? rep.splitting_fit->exponent : 0.0, 100 * split_dev, elapsed, config.n_s, config.n_t);
  const bool ok7 = std::abs(lead_dev) < 0.02 && std::abs(ratio_dev) < 0.05 && std::abs(split_dev) < 0.05 &&
                   gap_dev < 0.10 && !rep.splitting_measured.empty() && config.n_s <= 1024 && config.n_t <= 512;
  char buf[512];
  std::snprintf(buf, sizeof buf, "2D sweep k=1 down to h=%.3g: exponent %+.2f%% (2%%), ratio %+.2f%% (5%%), "
                "splitting exponent %+.2f%% (5%%), worst splitting %.2f%% (10%%)",
                rep.rows.back().h, 100 * lead_dev, 100 * ratio_dev, 100 * split_dev, 100 * gap_dev);
  verdict(7, ok7, buf);

  for (const auto& w : rep.warnings) detail("warning: %s", w.c_str());
  std::snprintf(buf, sizeof buf, "every lambda_m within z_m +- c h^(11/6) with fitted c = %.4g: %s; %d predicted "
                "gaps free of measured eigenvalues: %s",
                rep.band_constant, rep.band_holds ? "yes" : "no", rep.gap_count, rep.gaps_clear ? "yes" : "no");
  verdict(8, rep.band_holds && rep.gaps_clear && rep.gap_count > 0, buf);
}

void guarded(std::initializer_list<int> ids, void (*fn)()) {
  try {
    fn();
  } catch (const std::exception& e) {
    for (int id : ids) verdict(id, false, std::string("aborted: ") + e.what());
  }
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  guarded({1}, criterion_table);
  for (int k = 1; k <= 7; ++k) reports.push_back(minimize_alpha(k, 1e-8));
  guarded({2}, criterion_identities);
  guarded({3}, criterion_condik);
  guarded({4}, criterion_scaling);
  guarded({5}, criterion_parity);
  guarded({6}, criterion_k_oracle);
  guarded({7, 8}, criteria_2d);
  std::printf("%d of 8 criteria failed, %.0f s total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
