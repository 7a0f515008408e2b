#pragma once

// Reference solvers that share no code with the library: sinc collocation
// for the continuum spectrum, Prufer shooting for single levels, and dense
// diagonalization of an assembled tridiagonal matrix.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "magwell/sl_engine.hpp"

namespace oracle {

// Sinc collocation of -u'' + V u on [-L, L] with spacing dx; exponentially
// accurate for smooth confining V once L is past the turning points.
inline std::vector<double> sinc_levels(const std::function<double(double)>& V, double L, double dx, int count) {
  const int n = 2 * static_cast<int>(std::ceil(L / dx)) + 1;
  const double x0 = -dx * (n - 1) / 2;
  Eigen::MatrixXd H(n, n);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        H(i, j) = pi2 / (3.0 * dx * dx) + V(x0 + i * dx);
      } else {
        const int d = i - j;
        H(i, j) = 2.0 * ((d % 2 == 0) ? 1.0 : -1.0) / (d * d * dx * dx);
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  std::vector<double> out(count);
  for (int m = 0; m < count; ++m) out[m] = es.eigenvalues()(m);
  return out;
}

// Prufer angle at t = L for energy E, integrated from theta(-L) = 0 by RK4.
inline double prufer_angle(const std::function<double(double)>& V, double L, int steps, double E) {
  auto f = [&](double t, double th) {
    const double c = std::cos(th), s = std::sin(th);
    return c * c + (E - V(t)) * s * s;
  };
  const double dt = 2.0 * L / steps;
  double th = 0.0, t = -L;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(t, th);
    const double k2 = f(t + dt / 2, th + dt / 2 * k1);
    const double k3 = f(t + dt / 2, th + dt / 2 * k2);
    const double k4 = f(t + dt, th + dt * k3);
    th += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += dt;
  }
  return th;
}

// lambda_m by bisection on theta(L) = (m + 1) pi.
inline double prufer_level(const std::function<double(double)>& V, int m, double L, int steps, double lo, double hi) {
  const double target = (m + 1) * std::numbers::pi;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (prufer_angle(V, L, steps, mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline Eigen::MatrixXd dense(const magwell::TridiagonalOperator& op) {
  const int n = op.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    M(i, i) = op.diag[i];
    if (i + 1 < n) M(i, i + 1) = M(i + 1, i) = op.offdiag;
  }
  return M;
}

inline Eigen::VectorXd dense_eigenvalues(const magwell::TridiagonalOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(op), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace oracle
