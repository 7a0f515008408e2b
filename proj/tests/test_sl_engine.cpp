#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "magwell/errors.hpp"
#include "magwell/sl_engine.hpp"
#include "oracles.hpp"

using namespace magwell;

TEST_CASE("free stencil entries") {
  const Grid1D g(1.0, 16);
  const auto op = assemble([](double) { return 0.0; }, g);
  const double dt = g.spacing();
  REQUIRE(op.size() == 14);
  for (double d : op.diag) CHECK(d == doctest::Approx(2.0 / (dt * dt)).epsilon(1e-15));
  CHECK(op.offdiag == doctest::Approx(-1.0 / (dt * dt)).epsilon(1e-15));
}

TEST_CASE("assembly matches a hand-built matrix for the k=1 potential") {
  const Grid1D g(5.0, 41);
  auto V = [](double t) { return (t * t / 2 - 0.35) * (t * t / 2 - 0.35); };
  const auto op = assemble(V, g);
  const double dt = 10.0 / 40.0;
  for (int i = 0; i < 39; ++i) {
    const double t = -5.0 + (i + 1) * dt;
    const double v = (t * t / 2 - 0.35) * (t * t / 2 - 0.35);
    CHECK(op.diag[i] == doctest::Approx(2.0 / (dt * dt) + v).epsilon(1e-14));
  }
  CHECK(op.offdiag == doctest::Approx(-1.0 / (dt * dt)).epsilon(1e-14));
}

TEST_CASE("non-finite potential is rejected with the offending point") {
  const Grid1D g(1.0, 21);
  try {
    assemble([](double t) { return t > 0.45 && t < 0.55 ? std::nan("") : 0.0; }, g);
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("0.5") != std::string::npos);
  }
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid1D(1.0, 15), InvalidInput);
  CHECK_THROWS_AS(Grid1D(0.0, 32), InvalidInput);
  const Grid1D g(3.0, 31);
  CHECK(g.point(0) == -3.0);
  CHECK(g.point(30) == 3.0);
  CHECK(g.spacing() == doctest::Approx(0.2));
}

TEST_CASE("harmonic oscillator on a fine grid") {
  const Grid1D g(12.0, 4001);
  const auto op = assemble([](double t) { return t * t; }, g);
  const auto s = lowest_eigenpairs(op, 3, 1e-12);
  const double dt = g.spacing();
  for (int m = 0; m < 3; ++m) {
    // first-order perturbation by -dt^2/12 d^4: <p^4> = 3(2m^2+2m+1)/4
    const double shift = dt * dt / 16.0 * (2.0 * m * m + 2.0 * m + 1.0);
    CHECK(std::abs(s.eigenvalues[m] - (2 * m + 1 - shift)) < 1e-8);
  }
  // the discrete values themselves sit dt^2/16 (2m^2+2m+1) below 2m+1; one
  // Richardson step against the refined grid recovers {1, 3, 5} to 1e-6
  const auto fine = lowest_eigenpairs(assemble([](double t) { return t * t; }, g.refined()), 3, 1e-12);
  for (int m = 0; m < 3; ++m) {
    CHECK(std::abs((4 * fine.eigenvalues[m] - s.eigenvalues[m]) / 3 - (2 * m + 1)) < 1e-6);
  }
}

TEST_CASE("quartic ground energy matches dense diagonalization of the same matrix") {
  const Grid1D g(5.0, 801);
  const auto op = assemble([](double t) { return t * t * t * t; }, g);
  const auto s = lowest_eigenpairs(op, 3, 1e-12);
  const auto ev = oracle::dense_eigenvalues(op);
  for (int m = 0; m < 3; ++m) CHECK(std::abs(s.eigenvalues[m] - ev(m)) < 1e-8);
}

TEST_CASE("particle in a box") {
  const double L = 1.0;
  const Grid1D g(L, 2001);
  const auto s = lowest_eigenpairs(assemble([](double) { return 0.0; }, g), 1, 1e-12);
  const double exact = std::numbers::pi * std::numbers::pi / (4 * L * L);
  const double dt = g.spacing();
  CHECK(std::abs(s.eigenvalues[0] - exact) < exact * exact * dt * dt / 12 * 1.01 + 1e-9);
}

TEST_CASE("eigenfunctions are normalized and oscillate") {
  const Grid1D g(8.0, 1601);
  const auto s = lowest_eigenpairs(assemble([](double t) { return t * t + 0.3 * std::sin(t); }, g), 6, 1e-12);
  for (int m = 0; m < 6; ++m) {
    CHECK(std::abs(grid_inner(g, s.eigenfunctions[m], s.eigenfunctions[m]) - 1.0) < 1e-12);
    CHECK(sign_changes(s.eigenfunctions[m]) == m);
    if (m > 0) CHECK(s.eigenvalues[m] > s.eigenvalues[m - 1]);
  }
}

TEST_CASE("requested count and tolerance are validated") {
  const auto op = assemble([](double t) { return t * t; }, Grid1D(4.0, 32));
  CHECK_THROWS_AS(lowest_eigenpairs(op, 0, 1e-8), InvalidInput);
  CHECK_THROWS_AS(lowest_eigenpairs(op, 2, 0.0), InvalidInput);
  CHECK_THROWS_AS(lowest_eigenpairs(op, 31, 1e-8), InvalidInput);
}

TEST_CASE("Sturm count agrees with a dense eigenvalue count at random energies") {
  const Grid1D g(6.0, 301);
  const auto op = assemble([](double t) { return t * t * t * t / 4 - t * t + 0.2 * t; }, g);
  const auto ev = oracle::dense_eigenvalues(op);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 60.0);
  for (int i = 0; i < 100; ++i) {
    const double E = U(rng);
    int below = 0;
    for (int j = 0; j < ev.size(); ++j) below += ev(j) < E;
    CHECK(sturm_count(op, E) == below);
  }
}

TEST_CASE("converged levels of simple potentials") {
  auto r = eigenvalue_converged([](double t) { return t * t; }, 4, 1e-9);
  CHECK(std::abs(r.value - 9.0) < 1e-7);

  auto k1 = eigenvalue_converged(
      [](double t) { return (t * t / 2 - 0.35) * (t * t / 2 - 0.35); }, 0, 1e-8);
  CHECK(std::abs(k1.value - 0.57) < 1e-2);
}

TEST_CASE("converged quartic level matches Prufer shooting") {
  auto V = [](double t) { return t * t * t * t / 4; };
  const auto r = eigenvalue_converged(V, 0, 1e-10);
  const double ref = oracle::prufer_level(V, 0, 6.0, 40000, 0.1, 2.0);
  CHECK(std::abs(r.value - ref) < 1e-7);
  const auto r2 = eigenvalue_converged(V, 2, 1e-10);
  const double ref2 = oracle::prufer_level(V, 2, 6.0, 40000, 2.0, 8.0);
  CHECK(std::abs(r2.value - ref2) < 1e-7);
}

TEST_CASE("random confining polynomials agree with sinc collocation") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> c4(0.3, 2.0), c2(-2.0, 2.0), c1(-1.0, 1.0), c3(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const double a4 = c4(rng), a3 = c3(rng), a2 = c2(rng), a1 = c1(rng);
    auto V = [=](double t) { return a4 * t * t * t * t + a3 * t * t * t + a2 * t * t + a1 * t; };
    const auto ref = oracle::sinc_levels(V, 7.0, 0.04, 3);
    for (int m = 0; m < 3; ++m) {
      const auto r = eigenvalue_converged(V, m, 1e-9);
      CHECK_MESSAGE(std::abs(r.value - ref[m]) < 1e-7, "trial " << trial << " m=" << m);
    }
  }
}

TEST_CASE("eigenvalues are monotone in the potential") {
  auto V1 = [](double t) { return t * t; };
  auto V2 = [](double t) { return t * t + 0.5 * std::sin(t) * std::sin(t); };
  for (int m = 0; m < 4; ++m) {
    CHECK(eigenvalue_converged(V1, m, 1e-8).value <= eigenvalue_converged(V2, m, 1e-8).value);
  }
}

TEST_CASE("refinement error drops by at least 3 per halving") {
  auto V = [](double t) { return t * t * t * t / 4 + t * t; };
  double prev_diff = 0.0;
  Grid1D g(6.0, 201);
  double prev = lowest_eigenpairs(assemble(V, g), 2, 1e-13).eigenvalues[1];
  for (int step = 0; step < 4; ++step) {
    g = g.refined();
    const double cur = lowest_eigenpairs(assemble(V, g), 2, 1e-13).eigenvalues[1];
    const double diff = std::abs(cur - prev);
    if (step > 0) CHECK(prev_diff / diff >= 3.0);
    prev_diff = diff;
    prev = cur;
  }
}

TEST_CASE("parity classification") {
  auto even = eigenvalue_converged([](double t) { return (t * t / 2 - 0.35) * (t * t / 2 - 0.35); }, 1, 1e-8);
  const auto p = parity_classify(even.spectrum);
  REQUIRE(p.size() >= 2);
  CHECK(p[0].parity == Parity::Even);
  CHECK(p[0].residual < 1e-8);
  CHECK(p[1].parity == Parity::Odd);

  auto skew = eigenvalue_converged([](double t) { return t * t + t; }, 0, 1e-8);
  CHECK(parity_classify(skew.spectrum)[0].parity == Parity::None);
}

TEST_CASE("spectrum CSV has a t column and one column per eigenfunction") {
  const Grid1D g(4.0, 17);
  const auto s = lowest_eigenpairs(assemble([](double t) { return t * t; }, g), 2, 1e-10);
  const std::string csv = spectrum_to_csv(s);
  CHECK(csv.rfind("t,u_0,u_1\r\n", 0) == 0);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 18);
}
