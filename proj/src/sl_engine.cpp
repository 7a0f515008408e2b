#include "magwell/sl_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "magwell/csv.hpp"
#include "magwell/errors.hpp"

namespace magwell {

Grid1D::Grid1D(double half_width, int n_points) : half_width_(half_width), n_points_(n_points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw InvalidInput("Grid1D: half width must be positive and finite");
  }
  if (n_points < kMinPoints) {
    throw InvalidInput("Grid1D: need at least " + std::to_string(kMinPoints) + " points, got " +
                       std::to_string(n_points));
  }
}

double Grid1D::point(int i) const {
  // Symmetric evaluation so that point(i) == -point(n-1-i) exactly.
  const int mirror = n_points_ - 1 - i;
  if (i <= mirror) return -half_width_ + i * spacing();
  return half_width_ - mirror * spacing();
}

TridiagonalOperator assemble(const Potential& potential, const Grid1D& grid) {
  const double dt = grid.spacing();
  const double inv_dt2 = 1.0 / (dt * dt);
  TridiagonalOperator op{grid, {}, -inv_dt2, {}};
  op.diag.resize(grid.n_interior());
  op.potential.resize(grid.n_interior());
  for (int i = 0; i < grid.n_interior(); ++i) {
    const double t = grid.point(i + 1);
    const double v = potential(t);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "assemble: potential is not finite at t = " << t;
      throw InvalidInput(msg.str());
    }
    op.potential[i] = v;
    op.diag[i] = 2.0 * inv_dt2 + v;
  }
  return op;
}

int sturm_count(const TridiagonalOperator& op, double energy) {
  const double off2 = op.offdiag * op.offdiag;
  const double tiny = std::numeric_limits<double>::min() * 1e10 + std::abs(op.offdiag) * 1e-300;
  int negatives = 0;
  double q = 1.0;
  for (int i = 0; i < op.size(); ++i) {
    q = op.diag[i] - energy - (i > 0 ? off2 / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++negatives;
  }
  return negatives;
}

namespace {

double gershgorin_low(const TridiagonalOperator& op) {
  return *std::min_element(op.diag.begin(), op.diag.end()) - 2.0 * std::abs(op.offdiag);
}

double gershgorin_high(const TridiagonalOperator& op) {
  return *std::max_element(op.diag.begin(), op.diag.end()) + 2.0 * std::abs(op.offdiag);
}

// Gaussian elimination with partial pivoting for (T - shift) x = b, the
// symmetric tridiagonal case of LAPACK's gtsv. Zero pivots are replaced by a
// tiny value, which is what inverse iteration wants.
void solve_shifted(const TridiagonalOperator& op, double shift, std::vector<double>& b) {
  const int n = op.size();
  std::vector<double> d(n), du(std::max(n - 1, 0), op.offdiag), dl(std::max(n - 1, 0), op.offdiag);
  for (int i = 0; i < n; ++i) d[i] = op.diag[i] - shift;
  const double tiny = std::numeric_limits<double>::epsilon() * (std::abs(op.offdiag) + 1.0) * 1e-3;
  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = tiny;
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      const double bt = b[i];
      b[i] = b[i + 1];
      b[i + 1] = bt - fact * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;
  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (int i = n - 3; i >= 0; --i) {
    b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
  }
}

double bisect_eigenvalue(const TridiagonalOperator& op, int index, double lo, double hi) {
  for (int it = 0; it < 256; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
      break;
    }
    if (sturm_count(op, mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// u^T T u / u^T u written as a sum of squared differences, which keeps full
// relative accuracy when dt is small (the matrix form cancels ~1/dt^2 terms).
double rayleigh_quotient(const TridiagonalOperator& op, std::span<const double> interior) {
  const double dt = op.grid.spacing();
  const int n = op.size();
  double kinetic = 0.0, pot = 0.0, norm = 0.0;
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double diff = interior[i] - prev;
    kinetic += diff * diff;
    pot += op.potential[i] * interior[i] * interior[i];
    norm += interior[i] * interior[i];
    prev = interior[i];
  }
  kinetic += prev * prev;
  return (kinetic / (dt * dt) + pot) / norm;
}

double residual_norm(const TridiagonalOperator& op, std::span<const double> u, double lambda) {
  const int n = op.size();
  double r2 = 0.0, n2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double tu = op.diag[i] * u[i];
    if (i > 0) tu += op.offdiag * u[i - 1];
    if (i + 1 < n) tu += op.offdiag * u[i + 1];
    const double r = tu - lambda * u[i];
    r2 += r * r;
    n2 += u[i] * u[i];
  }
  return std::sqrt(r2 / n2);
}

void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (double& x : v) x /= s;
}

}  // namespace

Spectrum1D lowest_eigenpairs(const TridiagonalOperator& op, int m_count, double tol) {
  if (m_count < 1) throw InvalidInput("lowest_eigenpairs: m_count must be >= 1");
  if (!(tol > 0.0)) throw InvalidInput("lowest_eigenpairs: tol must be positive");
  const int n = op.size();
  if (m_count > n) throw InvalidInput("lowest_eigenpairs: more eigenvalues requested than grid unknowns");

  const double lo = gershgorin_low(op);
  const double hi = gershgorin_high(op);
  if (!std::isfinite(lo) || !std::isfinite(hi) || sturm_count(op, lo) != 0 || sturm_count(op, hi) != n) {
    throw NumericalError("lowest_eigenpairs: Sturm bisection does not bracket the spectrum (ill-conditioned assembly)");
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));

  Spectrum1D out;
  out.grid = op.grid;
  std::vector<std::vector<double>> interior_vectors;
  for (int j = 0; j < m_count; ++j) {
    const double guess = bisect_eigenvalue(op, j, lo, hi);
    const double shift = guess + 1e-10 * std::max(std::abs(guess), std::numeric_limits<double>::epsilon() * scale);

    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.25 * std::sin(0.7 * i + j);
    normalize(v);
    for (int it = 0; it < 4; ++it) {
      solve_shifted(op, shift, v);
      // Eigenvalues that coincide to working precision (deep double wells)
      // share one inverse-iteration subspace; keep the vectors orthogonal.
      for (int p = 0; p < j; ++p) {
        if (std::abs(out.eigenvalues[p] - guess) < 1e-6 * std::max(1.0, std::abs(guess))) {
          double dot = 0.0;
          for (int i = 0; i < n; ++i) dot += v[i] * interior_vectors[p][i];
          for (int i = 0; i < n; ++i) v[i] -= dot * interior_vectors[p][i];
        }
      }
      normalize(v);
    }
    const double rq = rayleigh_quotient(op, v);
    const double res = residual_norm(op, v, rq);
    if (!std::isfinite(rq)) throw NumericalError("lowest_eigenpairs: inverse iteration produced a non-finite vector");
    out.eigenvalues.push_back(rq);
    out.convergence.push_back(std::max(res, std::numeric_limits<double>::epsilon() * std::abs(rq)));
    interior_vectors.push_back(v);
  }

  const double inv_sqrt_dt = 1.0 / std::sqrt(op.grid.spacing());
  for (auto& v : interior_vectors) {
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    double sign = 1.0;
    for (double x : v) {
      if (std::abs(x) > 1e-3 * peak) {
        sign = x > 0 ? 1.0 : -1.0;
        break;
      }
    }
    std::vector<double> full(op.grid.n_points(), 0.0);
    for (int i = 0; i < n; ++i) full[i + 1] = sign * v[i] * inv_sqrt_dt;
    out.eigenfunctions.push_back(std::move(full));
  }
  (void)tol;
  return out;
}

namespace {

double tail_mass(const Spectrum1D& s, int m, double fraction) {
  const auto& u = s.eigenfunctions[m];
  const double cut = fraction * s.grid.half_width();
  double mass = 0.0;
  for (int i = 0; i < s.grid.n_points(); ++i) {
    if (std::abs(s.grid.point(i)) > cut) mass += u[i] * u[i];
  }
  return mass * s.grid.spacing();
}

}  // namespace

ConvergedEigenvalue eigenvalue_converged(const Potential& potential, int m, double tol,
                                         const ConvergenceOptions& options) {
  if (m < 0) throw InvalidInput("eigenvalue_converged: m must be >= 0");
  if (!(tol > 0.0)) throw InvalidInput("eigenvalue_converged: tol must be positive");

  const int ppl = options.coarse_points_per_half_width;
  double L = options.initial_half_width;

  // Truncation: grow L until the barrier at +-L clears the level by a margin.
  for (int d = 0;; ++d) {
    const Grid1D g(L, 2 * ppl + 1);
    const double est = lowest_eigenpairs(assemble(potential, g), m + 1, 1e-6).eigenvalues[m];
    const double barrier = std::min(potential(L), potential(-L));
    if (barrier >= est + 3.0 * std::max(std::abs(est), 1.0)) break;
    if (d >= options.max_doublings) {
      throw NumericalError("eigenvalue_converged: potential does not confine level " + std::to_string(m) +
                           " within half width " + std::to_string(L));
    }
    L *= 2.0;
  }

  const double base_spacing = L / ppl;
  double last = std::numeric_limits<double>::quiet_NaN();
  double before_last = last;
  for (int d = 0; d <= options.max_doublings; ++d, L *= 2.0) {
    int n = static_cast<int>(std::lround(2.0 * L / base_spacing)) + 1;
    std::vector<double> prev_levels;
    std::vector<double> prev_extrap;
    Grid1D prev_grid(L, n);
    bool converged = false;
    Spectrum1D finest;
    std::vector<double> extrap, diffs;
    while (n <= options.max_points) {
      const Grid1D g(L, n);
      Spectrum1D s = lowest_eigenpairs(assemble(potential, g), m + 1, tol);
      if (!prev_levels.empty()) {
        extrap.assign(m + 1, 0.0);
        for (int j = 0; j <= m; ++j) extrap[j] = (4.0 * s.eigenvalues[j] - prev_levels[j]) / 3.0;
        if (!prev_extrap.empty()) {
          diffs.assign(m + 1, 0.0);
          for (int j = 0; j <= m; ++j) diffs[j] = std::abs(extrap[j] - prev_extrap[j]);
          before_last = prev_extrap[m];
          last = extrap[m];
          if (diffs[m] < tol) {
            converged = true;
            finest = std::move(s);
            break;
          }
        }
        prev_extrap = extrap;
      }
      prev_levels = s.eigenvalues;
      prev_grid = g;
      n = 2 * n - 1;
    }
    if (!converged) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "eigenvalue_converged: level " << m << " not converged to " << tol << " within " << options.max_points
          << " points; last estimates " << before_last << ", " << last;
      throw NumericalError(msg.str());
    }
    const double floor = std::max(tol * tol, 1e-28);
    if (tail_mass(finest, m, 0.8) < floor) {
      ConvergedEigenvalue out;
      out.value = extrap[m];
      out.estimate = diffs[m];
      finest.eigenvalues = extrap;
      finest.convergence = diffs;
      out.spectrum = std::move(finest);
      out.coarse = prev_grid;
      return out;
    }
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "eigenvalue_converged: eigenfunction " << m << " still reaches the truncation boundary; last estimates "
      << before_last << ", " << last;
  throw NumericalError(msg.str());
}

std::vector<ParityResult> parity_classify(const Spectrum1D& spectrum, double threshold) {
  std::vector<ParityResult> out;
  const int n = spectrum.grid.n_points();
  const double dt = spectrum.grid.spacing();
  for (const auto& u : spectrum.eigenfunctions) {
    double even = 0.0, odd = 0.0;
    for (int i = 0; i < n; ++i) {
      const double mirrored = u[n - 1 - i];
      even += (mirrored - u[i]) * (mirrored - u[i]);
      odd += (mirrored + u[i]) * (mirrored + u[i]);
    }
    even = std::sqrt(even * dt);
    odd = std::sqrt(odd * dt);
    ParityResult r;
    r.residual = std::min(even, odd);
    r.parity = r.residual > threshold ? Parity::None : (even <= odd ? Parity::Even : Parity::Odd);
    out.push_back(r);
  }
  return out;
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::Even:
      return "even";
    case Parity::Odd:
      return "odd";
    case Parity::None:
      break;
  }
  return "none";
}

int sign_changes(std::span<const double> u, double rel_floor) {
  double peak = 0.0;
  for (double x : u) peak = std::max(peak, std::abs(x));
  int changes = 0;
  int last_sign = 0;
  for (double x : u) {
    if (std::abs(x) <= rel_floor * peak) continue;
    const int s = x > 0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

double grid_inner(const Grid1D& grid, std::span<const double> u, std::span<const double> v,
                  const std::function<double(double)>& weight) {
  double s = 0.0;
  for (int i = 0; i < grid.n_points(); ++i) {
    const double w = weight ? weight(grid.point(i)) : 1.0;
    s += w * u[i] * v[i];
  }
  return s * grid.spacing();
}

std::string spectrum_to_csv(const Spectrum1D& spectrum) {
  std::vector<std::string> header{"t"};
  for (int m = 0; m < spectrum.count(); ++m) header.push_back("u_" + std::to_string(m));
  CsvWriter csv(header);
  for (int i = 0; i < spectrum.grid.n_points(); ++i) {
    std::vector<double> row{spectrum.grid.point(i)};
    for (const auto& u : spectrum.eigenfunctions) row.push_back(u[i]);
    csv.add_row(row);
  }
  return csv.str();
}

}  // namespace magwell
