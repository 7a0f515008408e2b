#include "magwell/montgomery.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "magwell/csv.hpp"
#include "magwell/errors.hpp"

namespace magwell {

void ModelParams::validate() const {
  if (k < 1) throw InvalidInput("ModelParams: k must be >= 1, got " + std::to_string(k));
  if (beta == 0.0 || !std::isfinite(beta)) throw InvalidInput("ModelParams: beta must be finite and nonzero");
  if (!std::isfinite(alpha)) throw InvalidInput("ModelParams: alpha must be finite");
}

double flux_profile(int k, double t) { return std::pow(t, k + 1) / (k + 1); }

Potential montgomery_potential(const ModelParams& p) {
  p.validate();
  return [k = p.k, a = p.alpha, b = p.beta](double t) {
    const double x = b * flux_profile(k, t) - a;
    return x * x;
  };
}

double lambda_m(const ModelParams& params, int m, double tol) {
  params.validate();
  ModelParams p = params;
  if (p.beta < 0.0) {
    // k even: t -> -t flips the sign of t^{k+1}. k odd: t^{k+1} is even, so
    // flip the sign of the whole bracket instead, which also negates alpha.
    p.beta = -p.beta;
    if (p.k % 2 == 1) p.alpha = -p.alpha;
  }
  const double e = 1.0 / (p.k + 2);
  const double energy_scale = std::pow(p.beta, 2.0 * e);
  const ModelParams unit{p.k, std::pow(p.beta, -e) * p.alpha, 1.0};
  return energy_scale * eigenvalue_converged(montgomery_potential(unit), m, tol / energy_scale).value;
}

BandSolver::BandSolver(int k, Grid1D grid) : k_(k), grid_(grid) {
  if (k < 1) throw InvalidInput("BandSolver: k must be >= 1");
}

BandSolver BandSolver::for_range(int k, double alpha_lo, double alpha_hi, int levels, double tol) {
  if (!(alpha_lo <= alpha_hi)) throw InvalidInput("BandSolver::for_range: empty alpha range");
  std::vector<double> probes{alpha_lo, 0.5 * (alpha_lo + alpha_hi), alpha_hi};
  if (alpha_lo < 0.0 && alpha_hi > 0.0) probes.push_back(0.0);
  double half_width = 0.0;
  double spacing = std::numeric_limits<double>::infinity();
  for (double a : probes) {
    const auto c = eigenvalue_converged(montgomery_potential({k, a, 1.0}), levels - 1, tol);
    half_width = std::max(half_width, c.spectrum.grid.half_width());
    spacing = std::min(spacing, c.coarse.spacing());
  }
  const int n = static_cast<int>(std::ceil(2.0 * half_width / spacing)) + 1;
  return BandSolver(k, Grid1D(half_width, std::max(n, Grid1D::kMinPoints)));
}

namespace {

double extrapolate(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

}  // namespace

BandSolver::Sample BandSolver::sample(double alpha, int levels) const {
  const Potential v = montgomery_potential({k_, alpha, 1.0});
  Sample s;
  s.alpha = alpha;
  s.coarse = lowest_eigenpairs(assemble(v, grid_), levels, 1e-12);
  s.fine = lowest_eigenpairs(assemble(v, grid_.refined()), levels, 1e-12);
  for (int j = 0; j < levels; ++j) s.levels.push_back(extrapolate(s.coarse.eigenvalues[j], s.fine.eigenvalues[j]));
  return s;
}

double BandSolver::lambda0(double alpha) const { return sample(alpha).levels[0]; }

double BandSolver::ground_expectation(const Sample& s, const std::function<double(double)>& f) const {
  const auto& uc = s.coarse.eigenfunctions[0];
  const auto& uf = s.fine.eigenfunctions[0];
  return extrapolate(grid_inner(s.coarse.grid, uc, uc, f), grid_inner(s.fine.grid, uf, uf, f));
}

double BandSolver::dlambda(const Sample& s) const {
  const int k = k_;
  const double a = s.alpha;
  return -2.0 * ground_expectation(s, [k, a](double t) { return flux_profile(k, t) - a; });
}

double BandSolver::dlambda(double alpha) const { return dlambda(sample(alpha)); }

std::vector<double> ground_state_alpha_derivative(int k, double alpha, const Spectrum1D& s, double solve_tol) {
  const Grid1D& g = s.grid;
  const int n = g.n_interior();
  const double dt = g.spacing();
  const double lambda = s.eigenvalues[0];
  const auto& u_full = s.eigenfunctions[0];

  std::vector<double> shape(n);
  for (int i = 0; i < n; ++i) shape[i] = flux_profile(k, g.point(i + 1)) - alpha;
  double hf = 0.0;
  for (int i = 0; i < n; ++i) hf += shape[i] * u_full[i + 1] * u_full[i + 1];
  hf *= -2.0 * dt;

  const TridiagonalOperator op = assemble(montgomery_potential({k, alpha, 1.0}), g);

  // Bordered system [T - lambda, u; u^T, 0] [w; mu] = [rhs; 0] pins w to the
  // orthogonal complement of u0 where T - lambda is invertible.
  using Sparse = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * n + 2);
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, i, op.diag[i] - lambda);
    if (i + 1 < n) {
      trip.emplace_back(i, i + 1, op.offdiag);
      trip.emplace_back(i + 1, i, op.offdiag);
    }
    trip.emplace_back(i, n, u_full[i + 1]);
    trip.emplace_back(n, i, u_full[i + 1]);
  }
  Sparse a(n + 1, n + 1);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs(n + 1);
  for (int i = 0; i < n; ++i) rhs[i] = (2.0 * shape[i] + hf) * u_full[i + 1];
  rhs[n] = 0.0;

  Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NumericalError("reduced resolvent: factorization failed");
  const Eigen::VectorXd sol = lu.solve(rhs);

  double r2 = 0.0, b2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double tw = (op.diag[i] - lambda) * sol[i];
    if (i > 0) tw += op.offdiag * sol[i - 1];
    if (i + 1 < n) tw += op.offdiag * sol[i + 1];
    const double r = tw - rhs[i];
    r2 += r * r;
    b2 += rhs[i] * rhs[i];
  }
  const double rel = std::sqrt(r2 / b2);
  if (!(rel <= solve_tol)) {
    std::ostringstream msg;
    msg << "reduced resolvent: relative residual " << rel << " exceeds " << solve_tol;
    throw NumericalError(msg.str());
  }
  std::vector<double> w(g.n_points(), 0.0);
  for (int i = 0; i < n; ++i) w[i + 1] = sol[i];
  return w;
}

double BandSolver::d2lambda(const Sample& s, double solve_tol) const {
  auto on_grid = [&](const Spectrum1D& spec) {
    const auto w = ground_state_alpha_derivative(k_, s.alpha, spec, solve_tol);
    const int k = k_;
    const double a = s.alpha;
    return 2.0 - 4.0 * grid_inner(spec.grid, spec.eigenfunctions[0], w,
                                  [k, a](double t) { return flux_profile(k, t) - a; });
  };
  return extrapolate(on_grid(s.coarse), on_grid(s.fine));
}

double BandSolver::d2lambda(double alpha, double solve_tol) const { return d2lambda(sample(alpha), solve_tol); }

namespace {

// Second central difference at step h and h/2, Richardson-combined.
double second_difference(const BandSolver& solver, double alpha, double h) {
  auto d2 = [&](double step) {
    return (solver.lambda0(alpha + step) - 2.0 * solver.lambda0(alpha) + solver.lambda0(alpha - step)) /
           (step * step);
  };
  return extrapolate(d2(h), d2(0.5 * h));
}

double golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

BandSolver solver_at(int k, double alpha, double tol, int levels = 1) {
  const auto c = eigenvalue_converged(montgomery_potential({k, alpha, 1.0}), levels - 1, tol);
  return BandSolver(k, c.coarse);
}

}  // namespace

double nondegeneracy_bound(int k, double nu_hat, double lambda1) {
  return 2.0 * ((k + 2) * lambda1 - (k + 6) * nu_hat) / ((k + 2) * (lambda1 - nu_hat));
}

MinimizerReport minimize_alpha(int k, double tol, const MinimizeOptions& options) {
  if (k < 1) throw InvalidInput("minimize_alpha: k must be >= 1");
  if (!(tol > 0.0)) throw InvalidInput("minimize_alpha: tol must be positive");
  const double lo = options.scan_lo.value_or(-1.0);
  const double hi = options.scan_hi.value_or(2.0 + k);

  const BandSolver solver = BandSolver::for_range(k, lo, hi, 3, std::min(tol, 1e-6));
  const Grid1D& fine = solver.grid();
  const Grid1D scan_grid(fine.half_width(), std::max((fine.n_points() - 1) / 2 + 1, Grid1D::kMinPoints));

  const int n_scan = static_cast<int>(std::ceil((hi - lo) / options.scan_step)) + 1;
  std::vector<double> alphas(n_scan), values(n_scan);
  for (int i = 0; i < n_scan; ++i) {
    alphas[i] = i + 1 == n_scan ? hi : lo + i * options.scan_step;
    const auto op = assemble(montgomery_potential({k, alphas[i], 1.0}), scan_grid);
    values[i] = lowest_eigenpairs(op, 1, 1e-10).eigenvalues[0];
  }
  const auto global = std::min_element(values.begin(), values.end()) - values.begin();
  if (global == 0 || global == n_scan - 1) {
    std::ostringstream msg;
    msg << "minimize_alpha: lowest scanned value at alpha = " << alphas[global]
        << " lies on the scan boundary [" << lo << ", " << hi << "]";
    throw NumericalError(msg.str());
  }

  MinimizerReport r;
  r.k = k;
  r.scan_lo = lo;
  r.scan_hi = hi;
  r.tol = tol;
  r.grid = fine;
  auto f = [&](double a) { return solver.lambda0(a); };
  for (int i = 1; i + 1 < n_scan; ++i) {
    if (values[i] <= values[i - 1] && values[i] < values[i + 1]) {
      double a = golden_section(f, alphas[i - 1], alphas[i + 1], options.alpha_tol);
      // Golden section stalls at ~sqrt(eps) relative flatness; Newton on the
      // Hellmann-Feynman derivative takes alpha to the discrete critical point.
      for (int it = 0; it < 3; ++it) {
        const auto s = solver.sample(a);
        const double curv = solver.d2lambda(s);
        if (!(curv > 0.0)) break;
        const double next = a - solver.dlambda(s) / curv;
        if (!(std::abs(next - a) < options.alpha_tol * 10) || next <= alphas[i - 1] || next >= alphas[i + 1]) break;
        a = next;
      }
      r.local_minima_scan.push_back({a, f(a)});
    }
  }
  const auto best = std::min_element(r.local_minima_scan.begin(), r.local_minima_scan.end(),
                                     [](const LocalMinimum& x, const LocalMinimum& y) { return x.lambda0 < y.lambda0; });
  r.alpha_min = best->alpha;

  const Potential v = montgomery_potential({k, r.alpha_min, 1.0});
  r.nu_hat = eigenvalue_converged(v, 0, tol / 10).value;
  r.lambda1 = eigenvalue_converged(v, 1, tol / 10).value;
  r.lambda2 = eigenvalue_converged(v, 2, tol / 10).value;

  const auto s = solver.sample(r.alpha_min);
  r.d2 = solver.d2lambda(s);
  r.d2_fd = second_difference(solver, r.alpha_min, 1e-3);
  if (std::abs(r.d2 - r.d2_fd) > std::max(10.0 * tol, 1e-6)) {
    std::ostringstream msg;
    msg << "minimize_alpha: resolvent second derivative " << r.d2 << " disagrees with finite differences " << r.d2_fd;
    throw NumericalError(msg.str());
  }
  r.hf_residual = std::abs(solver.dlambda(s));
  r.lambda01_residual = 0.5 * r.hf_residual;
  const double a = r.alpha_min;
  r.norm_identity_lhs = solver.ground_expectation(s, [k, a](double t) {
    const double x = flux_profile(k, t) - a;
    return x * x;
  });
  r.norm_identity_residual = std::abs(r.norm_identity_lhs - s.levels[0] / (k + 2));

  const auto verdict = nondegeneracy_check(r);
  r.d2_lower_bound = verdict.bound;
  r.condik_holds = verdict.condik_holds;
  r.condik_margin = verdict.condik_margin;
  r.condik_odd_holds = verdict.condik_odd_holds;
  r.condik_odd_margin = verdict.condik_odd_margin;
  return r;
}

double dlambda_dalpha(int k, double alpha, double tol) { return solver_at(k, alpha, tol).dlambda(alpha); }

SecondDerivative d2lambda_dalpha2(int k, double alpha, double tol) {
  const BandSolver solver = solver_at(k, alpha, tol);
  SecondDerivative out;
  out.value = solver.d2lambda(alpha);
  out.finite_difference = second_difference(solver, alpha, 1e-3);
  if (std::abs(out.value - out.finite_difference) > 10.0 * tol) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "d2lambda_dalpha2: resolvent value " << out.value << " vs finite differences " << out.finite_difference
        << " differ by more than 10 * tol";
    throw NumericalError(msg.str());
  }
  return out;
}

DerivativeCheck hellmann_feynman_check(int k, double alpha, double tol) {
  DerivativeCheck c;
  c.alpha = alpha;
  c.hellmann_feynman = dlambda_dalpha(k, alpha, tol);
  auto central = [&](double step) {
    return (lambda_m({k, alpha + step, 1.0}, 0, tol * 1e-3) - lambda_m({k, alpha - step, 1.0}, 0, tol * 1e-3)) /
           (2.0 * step);
  };
  const double coarse = central(2e-3);
  const double fine = central(1e-3);
  c.finite_difference = (4.0 * fine - coarse) / 3.0;
  c.residual = std::abs(c.hellmann_feynman - c.finite_difference);
  return c;
}

ScalingCheck scaling_check(const ModelParams& params, double tol) {
  params.validate();
  ScalingCheck c;
  c.params = params;
  c.direct = eigenvalue_converged(montgomery_potential(params), 0, tol).value;
  ModelParams p = params;
  if (p.beta < 0.0) {
    p.beta = -p.beta;
    if (p.k % 2 == 1) p.alpha = -p.alpha;
  }
  const double e = 1.0 / (p.k + 2);
  const double scale = std::pow(p.beta, 2.0 * e);
  c.scaled = scale * eigenvalue_converged(montgomery_potential({p.k, std::pow(p.beta, -e) * p.alpha, 1.0}), 0,
                                          tol / scale)
                         .value;
  c.residual = std::abs(c.direct - c.scaled);
  return c;
}

std::vector<ParityResult> parity_check(int k, double alpha, int m_max, double tol) {
  const auto conv = eigenvalue_converged(montgomery_potential({k, alpha, 1.0}), m_max, tol);
  return parity_classify(conv.spectrum);
}

IdentityReport verify_identities(const MinimizerReport& report, double tol) {
  const BandSolver solver(report.k, report.grid);
  const auto s = solver.sample(report.alpha_min);
  const int k = report.k;
  const double a = report.alpha_min;
  IdentityReport out;
  out.k = k;
  out.lambda01_residual = std::abs(solver.ground_expectation(s, [k, a](double t) { return flux_profile(k, t) - a; }));
  out.norm_lhs = solver.ground_expectation(s, [k, a](double t) {
    const double x = flux_profile(k, t) - a;
    return x * x;
  });
  out.norm_rhs = s.levels[0] / (k + 2);
  out.norm_residual = std::abs(out.norm_lhs - out.norm_rhs);
  out.lambda01_pass = out.lambda01_residual < tol;
  out.norm_pass = out.norm_residual < tol;
  return out;
}

NondegeneracyVerdict nondegeneracy_check(const MinimizerReport& r, double tol) {
  NondegeneracyVerdict v;
  const int k = r.k;
  v.condik_margin = (k + 2) * r.lambda1 - (k + 6) * r.nu_hat;
  v.condik_holds = v.condik_margin > 0.0;
  v.bound = nondegeneracy_bound(k, r.nu_hat, r.lambda1);
  if (k % 2 == 1) {
    v.condik_odd_margin = (k + 2) * r.lambda2 - (k + 6) * r.nu_hat;
    v.condik_odd_holds = *v.condik_odd_margin > 0.0;
    v.bound_odd = nondegeneracy_bound(k, r.nu_hat, r.lambda2);
  }
  v.d2_above_bound = r.d2 >= v.bound - tol;
  return v;
}

ProfileTable profile(const MinimizerReport& report, double alpha_lo, double alpha_hi, int n_samples, double tol) {
  if (n_samples < 2) throw InvalidInput("profile: need at least 2 samples");
  if (!(alpha_lo < alpha_hi)) throw InvalidInput("profile: empty alpha range");
  ProfileTable table;
  table.k = report.k;
  table.alpha_min = report.alpha_min;
  table.nu_hat = report.nu_hat;
  table.d2 = report.d2;
  table.contains_alpha_min = alpha_lo <= report.alpha_min && report.alpha_min <= alpha_hi;
  const BandSolver solver = BandSolver::for_range(report.k, alpha_lo, alpha_hi, 1, tol);
  const double step = (alpha_hi - alpha_lo) / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) {
    const double a = i + 1 == n_samples ? alpha_hi : alpha_lo + i * step;
    table.rows.push_back({a, solver.lambda0(a), table.lambda_quad(a)});
  }
  return table;
}

std::string profile_to_csv(const ProfileTable& table) {
  CsvWriter csv({"alpha", "lambda0", "lambda_quad"});
  for (const auto& r : table.rows) csv.add_row(std::vector<double>{r.alpha, r.lambda0, r.lambda_quad});
  return csv.str();
}

std::vector<LargeAlphaRow> large_alpha_check(int k, const std::vector<double>& alphas, double tol) {
  if (k < 1 || k % 2 == 0) throw InvalidInput("large_alpha_check: k must be odd");
  std::vector<LargeAlphaRow> rows;
  const double p = static_cast<double>(k) / (k + 1);
  for (double a : alphas) {
    if (!(a > 0.0)) throw InvalidInput("large_alpha_check: alpha values must be positive");
    LargeAlphaRow r;
    r.alpha = a;
    r.lambda0 = lambda_m({k, a, 1.0}, 0, tol);
    r.asymptote = std::pow((k + 1) * a, p);
    r.ratio = r.lambda0 / r.asymptote;
    r.stated_asymptote = std::pow(k + 1.0, 2.0 * p) * std::pow(a, p);
    r.stated_ratio = r.lambda0 / r.stated_asymptote;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace magwell
