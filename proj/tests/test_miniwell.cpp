#include <doctest.h>

#include <cmath>
#include <random>

#include "magwell/errors.hpp"
#include "magwell/miniwell.hpp"

using namespace magwell;

namespace {

const MinimizerReport& report_k1() {
  static const MinimizerReport r = minimize_alpha(1, 1e-8);
  return r;
}

const MinimizerReport& report_k2() {
  static const MinimizerReport r = minimize_alpha(2, 1e-8);
  return r;
}

EffectiveOperatorK synthetic_K(double c, Eigen::MatrixXd Omega, Eigen::VectorXd e, double A = 0.0) {
  EffectiveOperatorK K;
  K.c_omega = c;
  K.Omega = std::move(Omega);
  K.e_omega = e.normalized();
  K.A_const = A;
  return K;
}

MiniwellGeometry curved() { return load_geometry(std::string(MAGWELL_SOURCE_DIR) + "/configs/geometry_curved_3d.json"); }

Eigen::Matrix2d rotation(double th) {
  Eigen::Matrix2d R;
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return R;
}

MiniwellGeometry rotate(const MiniwellGeometry& g, const Eigen::Matrix2d& R) {
  MiniwellGeometry r = g;
  r.omega01 = R * g.omega01;
  r.domega01 = R * g.domega01 * R.transpose();
  r.hess_abs2 = R * g.hess_abs2 * R.transpose();
  r.omega02 = R * g.omega02;
  r.gdot0j = R * g.gdot0j;
  r.gdotjl = R * g.gdotjl * R.transpose();
  r.gammaj0 = R * g.gammaj0;
  return r;
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::MatrixXd B(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) B(i, j) = U(rng);
  return B * B.transpose() + 0.3 * Eigen::MatrixXd::Identity(d, d);
}

}  // namespace

TEST_CASE("closed-form level examples") {
  auto iso = spectrum_K(synthetic_K(1.0, Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 0)), 4);
  REQUIRE(iso.levels.size() == 4);
  CHECK(iso.levels[0] == doctest::Approx(2.0));
  CHECK(iso.levels[1] == doctest::Approx(4.0));
  CHECK(iso.levels[2] == doctest::Approx(4.0));
  CHECK(iso.levels[3] == doctest::Approx(6.0));

  auto one = spectrum_K(synthetic_K(4.0, Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1)), 3);
  CHECK(one.levels[0] == doctest::Approx(2.0));
  CHECK(one.levels[1] == doctest::Approx(6.0));
  CHECK(one.levels[2] == doctest::Approx(10.0));

  Eigen::MatrixXd W = Eigen::Vector2d(4, 9).asDiagonal();
  auto shifted = spectrum_K(synthetic_K(1.0, W, Eigen::Vector2d(0, 1), 1.0), 3);
  CHECK(shifted.levels[0] == doctest::Approx(6.0));
  CHECK(shifted.levels[1] == doctest::Approx(10.0));
  CHECK(shifted.levels[2] == doctest::Approx(12.0));
  CHECK(shifted.branch == KSpectrum::Branch::Nondegenerate);
}

TEST_CASE("first gap is twice the smallest frequency") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 10; ++i) {
    const int d = 1 + i % 3;
    Eigen::VectorXd e = Eigen::VectorXd::Random(d);
    const auto s = spectrum_K(synthetic_K(0.5 + i * 0.3, random_spd(rng, d), e), 6);
    const double fmin = *std::min_element(s.frequencies.begin(), s.frequencies.end());
    CHECK(std::abs((s.levels[1] - s.levels[0]) - 2.0 * fmin) < 1e-10);
  }
  // Distinct levels can be closer than 2 min sqrt(mu): frequencies 1 and 1.1
  // give 2.1, 4.1, 4.3.
  Eigen::MatrixXd W = Eigen::Vector2d(1.0, 1.21).asDiagonal();
  const auto s = spectrum_K(synthetic_K(1.0, W, Eigen::Vector2d(1, 0)), 3);
  CHECK(s.levels[2] - s.levels[1] == doctest::Approx(0.2));
}

TEST_CASE("closed form errors") {
  CHECK_THROWS_AS(spectrum_K(synthetic_K(-0.1, Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 0)), 2),
                  NumericalError);
  Eigen::MatrixXd indefinite = Eigen::Vector2d(1.0, -0.5).asDiagonal();
  CHECK_THROWS_AS(spectrum_K(synthetic_K(1.0, indefinite, Eigen::Vector2d(1, 0)), 2), NumericalError);
}

TEST_CASE("Omega formula") {
  const auto& r2 = report_k2();
  auto g1 = MiniwellGeometry::flat_2d(1.0, 2.0);
  const auto W1 = build_Omega(g1, 2, r2);
  CHECK(W1(0, 0) == doctest::Approx(r2.nu_hat / 4.0).epsilon(1e-6));

  MiniwellGeometry g;
  g.n = 3;
  g.omega01 = Eigen::Vector2d(1.0, 0.0);
  g.domega01 = Eigen::MatrixXd::Zero(2, 2);
  g.hess_abs2 = Eigen::Vector2d(2.0, 4.0).asDiagonal();
  g.omega02 = Eigen::VectorXd::Zero(2);
  g.gdot0j = Eigen::VectorXd::Zero(2);
  g.gdotjl = Eigen::MatrixXd::Zero(2, 2);
  g.gammaj0 = Eigen::VectorXd::Zero(2);
  const auto W = build_Omega(g, 1, report_k1());
  CHECK(std::abs(W(0, 0) - 0.57 / 6 * 2) < 0.01 * 0.57 / 6 * 2);
  CHECK(std::abs(W(1, 1) - 0.57 / 6 * 4) < 0.01 * 0.57 / 6 * 4);
  CHECK(W(0, 1) == 0.0);

  const double c = 2.5;
  MiniwellGeometry gc = g;
  gc.omega01 *= c;
  const auto Wc = build_Omega(gc, 1, report_k1());
  CHECK((Wc - std::pow(c, -4.0 / 3.0) * W).norm() < 1e-14);
}

TEST_CASE("moments") {
  for (int k : {2, 4}) {
    const auto m = converged_moments(k, 0.0, 1e-9);
    CHECK(std::abs(m.m_tau_upp) < 1e-6);
    CHECK(std::abs(m.m_tau_sq) < 1e-6);
  }
  // u is even for every k, so every odd-in-t moment vanishes for odd k as well
  const auto& r1 = report_k1();
  const auto m1 = converged_moments(1, r1.alpha_min, 1e-9);
  CHECK(std::abs(m1.m_tau_upp) < 1e-6);
  CHECK(std::abs(m1.m_tau_sq) < 1e-6);

  // independent quadrature of the mixed moment on a doubled grid
  const auto conv = eigenvalue_converged(montgomery_potential({1, r1.alpha_min, 1.0}), 0, 1e-9);
  const Grid1D fine = conv.spectrum.grid.refined();
  const auto s = lowest_eigenpairs(assemble(montgomery_potential({1, r1.alpha_min, 1.0}), fine), 1, 1e-13);
  double mixed = 0.0;
  for (int i = 0; i < fine.n_points(); ++i) {
    const double t = fine.point(i), u = s.eigenfunctions[0][i];
    mixed += t * t * t / 3 * (t * t / 2 - r1.alpha_min) * u * u * fine.spacing();
  }
  CHECK(std::abs(m1.m_mixed - mixed) < 1e-6);
}

TEST_CASE("A constant") {
  const auto& r1 = report_k1();
  const auto m1 = converged_moments(1, r1.alpha_min);
  const auto flat = MiniwellGeometry::flat_2d(1.0, 0.3);
  CHECK(std::abs(build_A(flat, 1, r1, m1)) == 0.0);

  const auto g = curved();
  CHECK(build_A(g, 2, report_k2(), converged_moments(2, 0.0)).imag() == doctest::Approx(0.0).epsilon(1e-12));

  auto only_gdot00 = MiniwellGeometry::flat_2d(1.0, 0.3);
  only_gdot00.gdot00 = 1.0;
  CHECK(build_A(only_gdot00, 1, r1, m1) == std::complex<double>(-m1.m_tau_upp, 0.0));
}

TEST_CASE("A terms are selective") {
  const auto& r1 = report_k1();
  const Moments1D m{0.3, 0.7, 1.1};  // synthetic values make every term visible
  const auto g = curved();
  const auto full = build_A_terms(g, 1, r1, m);
  CHECK(std::abs(full.metric_normal) > 0);
  CHECK(std::abs(full.divergence) > 0);
  CHECK(std::abs(full.omega02) > 0);
  CHECK(std::abs(full.metric_tangential) > 0);

  auto check = [&](MiniwellGeometry h, int which) {
    const auto t = build_A_terms(h, 1, r1, m);
    const std::complex<double> a[4] = {t.metric_normal, t.divergence, t.omega02, t.metric_tangential};
    const std::complex<double> b[4] = {full.metric_normal, full.divergence, full.omega02, full.metric_tangential};
    for (int i = 0; i < 4; ++i) {
      if (i == which) CHECK(a[i] == std::complex<double>(0.0, 0.0));
      else CHECK(a[i] == b[i]);
    }
  };
  auto h = g;
  h.gdot00 = 0.0;
  check(h, 0);
  h = g;
  h.domega_div = 0.0;
  check(h, 1);
  h = g;
  h.omega02.setZero();
  check(h, 2);
  h = g;
  h.gdotjl.setZero();
  check(h, 3);
}

TEST_CASE("geometry validation") {
  auto g = curved();
  CHECK_NOTHROW(g.validate());
  auto bad = g;
  bad.domega01(0, 0) += 1e-3;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = g;
  bad.hess_abs2(0, 0) = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = g;
  bad.omega01.setZero();
  CHECK_THROWS_AS(bad.validate(), InvalidInput);

  nlohmann::json j = to_json(g);
  CHECK_NOTHROW(geometry_from_json(j));
  j["bogus"] = 1;
  CHECK_THROWS_AS(geometry_from_json(j), InvalidInput);
  nlohmann::json minimal = {{"n", 2}, {"omega01", {1.0}}, {"hess_abs2", {{0.5}}}};
  const auto gm = geometry_from_json(minimal);
  CHECK(gm.gdot00 == 0.0);
  minimal.erase("hess_abs2");
  CHECK_THROWS_AS(geometry_from_json(minimal), InvalidInput);
}

TEST_CASE("spectrum is invariant under frame rotation") {
  const auto g = curved();
  auto moments = converged_moments(1, report_k1().alpha_min);
  const auto base = spectrum_K(build_K(g, report_k1(), moments), 8);
  for (double th : {0.3, 1.2, 2.9}) {
    const auto rot = spectrum_K(build_K(rotate(g, rotation(th)), report_k1(), moments), 8);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(rot.levels[i] - base.levels[i]) < 1e-10);
  }
}

TEST_CASE("finite-difference oracle") {
  const auto ho = spectrum_K_oracle(synthetic_K(1.0, Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1)), 3);
  for (int m = 0; m < 3; ++m) CHECK(std::abs(ho.levels[m] - (2 * m + 1)) < 1e-5);

  std::mt19937_64 rng(99);
  for (int i = 0; i < 2; ++i) {
    const auto K = synthetic_K(2.0, random_spd(rng, 2), Eigen::Vector2d::Random(), 0.25);
    const auto closed = spectrum_K(K, 4);
    const auto fd = spectrum_K_oracle(K, 4);
    for (int m = 0; m < 4; ++m) CHECK(std::abs(closed.levels[m] - fd.levels[m]) < 1e-4);
  }

  Eigen::Matrix2d W;
  W << 1.5, 0.4, 0.4, 0.8;
  const auto degenerate = synthetic_K(0.0, W, Eigen::Vector2d(1.0, 1.0), 0.1);
  const auto closed = spectrum_K(degenerate, 1);
  CHECK(closed.branch == KSpectrum::Branch::Degenerate);
  const auto fd = spectrum_K_oracle(degenerate, 1);
  CHECK(std::abs(fd.levels[0] - closed.bottom) < 1e-4);
}

TEST_CASE("JSON export") {
  const auto K = build_K(curved(), report_k1(), converged_moments(1, report_k1().alpha_min));
  const auto s = spectrum_K(K, 4);
  CHECK(s.imag_A_warning);
  const auto j = to_json(s);
  CHECK(j.contains("levels"));
  CHECK(to_json(K).contains("Omega"));
}
