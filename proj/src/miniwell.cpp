#include "magwell/miniwell.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "magwell/errors.hpp"
#include "magwell/sparse_eigs.hpp"

namespace magwell {

namespace {

Eigen::VectorXd read_vector(const nlohmann::json& j, const char* key, int d) {
  if (!j.contains(key)) return Eigen::VectorXd::Zero(d);
  const auto& a = j.at(key);
  if (!a.is_array() || static_cast<int>(a.size()) != d) {
    throw InvalidInput(std::string("geometry: '") + key + "' must be an array of length " + std::to_string(d));
  }
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = a.at(i).get<double>();
  return v;
}

Eigen::MatrixXd read_matrix(const nlohmann::json& j, const char* key, int d) {
  if (!j.contains(key)) return Eigen::MatrixXd::Zero(d, d);
  const auto& a = j.at(key);
  const std::string shape = std::to_string(d) + "x" + std::to_string(d);
  if (!a.is_array() || static_cast<int>(a.size()) != d) {
    throw InvalidInput(std::string("geometry: '") + key + "' must be a " + shape + " array of rows");
  }
  Eigen::MatrixXd m(d, d);
  for (int r = 0; r < d; ++r) {
    const auto& row = a.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != d) {
      throw InvalidInput(std::string("geometry: '") + key + "' must be a " + shape + " array of rows");
    }
    for (int c = 0; c < d; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json a = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

nlohmann::json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

void MiniwellGeometry::validate() const {
  if (n < 2) throw InvalidInput("geometry: n must be at least 2");
  const int d = dim();
  auto check_vec = [d](const Eigen::VectorXd& v, const char* name) {
    if (v.size() != d) throw InvalidInput(std::string("geometry: ") + name + " has wrong length");
    if (!v.allFinite()) throw InvalidInput(std::string("geometry: ") + name + " is not finite");
  };
  auto check_mat = [d](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != d || m.cols() != d) throw InvalidInput(std::string("geometry: ") + name + " has wrong shape");
    if (!all_finite(m)) throw InvalidInput(std::string("geometry: ") + name + " is not finite");
  };
  check_vec(omega01, "omega01");
  check_vec(omega02, "omega02");
  check_vec(gdot0j, "gdot0j");
  check_vec(gammaj0, "gammaj0");
  check_mat(domega01, "domega01");
  check_mat(hess_abs2, "hess_abs2");
  check_mat(gdotjl, "gdotjl");
  if (!std::isfinite(gdot00) || !std::isfinite(gamma00) || !std::isfinite(domega_div)) {
    throw InvalidInput("geometry: scalar field is not finite");
  }
  if (!(omega01.norm() > 0.0)) throw InvalidInput("geometry: |omega01| must be positive");

  // |omega01| is stationary at the well, so D^T omega01 = 0.
  const Eigen::VectorXd grad = domega01.transpose() * omega01;
  const double grad_scale = std::max(1.0, omega01.norm() * domega01.norm());
  if (grad.lpNorm<Eigen::Infinity>() > 1e-8 * grad_scale) {
    std::ostringstream msg;
    msg << "geometry: gradient condition sum_j domega01[j][r] omega01[j] = 0 violated (max "
        << grad.lpNorm<Eigen::Infinity>() << ")";
    throw InvalidInput(msg.str());
  }
  const double hscale = std::max(1.0, hess_abs2.norm());
  if ((hess_abs2 - hess_abs2.transpose()).norm() > 1e-12 * hscale) {
    throw InvalidInput("geometry: hess_abs2 is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess_abs2);
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw InvalidInput("geometry: hess_abs2 is not positive definite (degenerate miniwell)");
  }
}

MiniwellGeometry MiniwellGeometry::flat_2d(double omega_min, double abs2_curvature) {
  MiniwellGeometry g;
  g.n = 2;
  g.omega01 = Eigen::VectorXd::Constant(1, omega_min);
  g.domega01 = Eigen::MatrixXd::Zero(1, 1);
  g.hess_abs2 = Eigen::MatrixXd::Constant(1, 1, abs2_curvature);
  g.omega02 = Eigen::VectorXd::Zero(1);
  g.gdot0j = Eigen::VectorXd::Zero(1);
  g.gdotjl = Eigen::MatrixXd::Zero(1, 1);
  g.gammaj0 = Eigen::VectorXd::Zero(1);
  return g;
}

MiniwellGeometry geometry_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {"n",      "omega01", "domega01", "hess_abs2",
                                              "omega02", "gdot00", "gdot0j",  "gdotjl",
                                              "gamma00", "gammaj0", "domega_div"};
  if (!j.is_object()) throw InvalidInput("geometry: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidInput("geometry: unknown field '" + key + "'");
  }
  for (const char* key : {"n", "omega01", "hess_abs2"}) {
    if (!j.contains(key)) throw InvalidInput(std::string("geometry: missing required field '") + key + "'");
  }
  MiniwellGeometry g;
  try {
    g.n = j.at("n").get<int>();
    if (g.n < 2) throw InvalidInput("geometry: n must be at least 2");
    const int d = g.n - 1;
    g.omega01 = read_vector(j, "omega01", d);
    g.domega01 = read_matrix(j, "domega01", d);
    g.hess_abs2 = read_matrix(j, "hess_abs2", d);
    g.omega02 = read_vector(j, "omega02", d);
    g.gdot00 = j.value("gdot00", 0.0);
    g.gdot0j = read_vector(j, "gdot0j", d);
    g.gdotjl = read_matrix(j, "gdotjl", d);
    g.gamma00 = j.value("gamma00", 0.0);
    g.gammaj0 = read_vector(j, "gammaj0", d);
    g.domega_div = j.value("domega_div", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("geometry: ") + e.what());
  }
  g.validate();
  return g;
}

MiniwellGeometry load_geometry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open geometry file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("geometry file '" + path + "': " + e.what());
  }
  return geometry_from_json(j);
}

nlohmann::json to_json(const MiniwellGeometry& g) {
  return {{"n", g.n},
          {"omega01", vector_json(g.omega01)},
          {"domega01", matrix_json(g.domega01)},
          {"hess_abs2", matrix_json(g.hess_abs2)},
          {"omega02", vector_json(g.omega02)},
          {"gdot00", g.gdot00},
          {"gdot0j", vector_json(g.gdot0j)},
          {"gdotjl", matrix_json(g.gdotjl)},
          {"gamma00", g.gamma00},
          {"gammaj0", vector_json(g.gammaj0)},
          {"domega_div", g.domega_div}};
}

Moments1D moments_1d(int k, double alpha_min, const Spectrum1D& ground) {
  if (ground.count() < 1) throw InvalidInput("moments_1d: spectrum has no ground state");
  const auto& u = ground.eigenfunctions[0];
  const Grid1D& grid = ground.grid;
  const double dt = grid.spacing();
  Moments1D m;
  for (int i = 1; i + 1 < grid.n_points(); ++i) {
    const double t = grid.point(i);
    const double upp = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dt * dt);
    const double p = flux_profile(k, t) - alpha_min;
    const double u2 = u[i] * u[i];
    m.m_tau_upp += t * upp * u[i] * dt;
    m.m_mixed += std::pow(t, k + 2) / (k + 2) * p * u2 * dt;
    m.m_tau_sq += t * p * p * u2 * dt;
  }
  return m;
}

Moments1D converged_moments(int k, double alpha_min, double tol) {
  const auto conv = eigenvalue_converged(montgomery_potential({k, alpha_min, 1.0}), 0, tol);
  const Spectrum1D coarse =
      lowest_eigenpairs(assemble(montgomery_potential({k, alpha_min, 1.0}), conv.coarse), 1, tol * 1e-3);
  const Moments1D f = moments_1d(k, alpha_min, conv.spectrum);
  const Moments1D c = moments_1d(k, alpha_min, coarse);
  auto rich = [](double fine, double crs) { return (4.0 * fine - crs) / 3.0; };
  return {rich(f.m_tau_upp, c.m_tau_upp), rich(f.m_mixed, c.m_mixed), rich(f.m_tau_sq, c.m_tau_sq)};
}

Eigen::MatrixXd build_Omega(const MiniwellGeometry& g, int k, const MinimizerReport& report) {
  g.validate();
  const double wmin = g.omega_min();
  const double prefactor = std::pow(wmin, -(2.0 * k + 2.0) / (k + 2.0));
  const Eigen::MatrixXd inner = report.nu_hat / (2.0 * (k + 2)) * g.hess_abs2 +
                                report.alpha_min * report.alpha_min * (g.domega01.transpose() * g.domega01);
  const Eigen::MatrixXd omega = prefactor * inner;
  if ((omega - omega.transpose()).norm() > 1e-12 * std::max(1.0, omega.norm())) {
    throw InvalidInput("build_Omega: result is not symmetric; check the geometry input");
  }
  return 0.5 * (omega + omega.transpose());
}

ATerms build_A_terms(const MiniwellGeometry& g, int k, const MinimizerReport& report, const Moments1D& moments) {
  (void)k;
  const double wmin = g.omega_min();
  ATerms a;
  a.metric_normal = -g.gdot00 * moments.m_tau_upp;
  a.divergence = std::complex<double>(0.0, g.domega_div * report.alpha_min / wmin);
  a.omega02 = 2.0 / (wmin * wmin) * g.omega01.dot(g.omega02) * moments.m_mixed;
  a.metric_tangential = g.omega01.dot(g.gdotjl * g.omega01) / (wmin * wmin) * moments.m_tau_sq;
  return a;
}

std::complex<double> build_A(const MiniwellGeometry& g, int k, const MinimizerReport& report,
                             const Moments1D& moments) {
  return build_A_terms(g, k, report, moments).total();
}

Eigen::MatrixXd EffectiveOperatorK::kinetic() const {
  const int d = dim();
  return Eigen::MatrixXd::Identity(d, d) + (c_omega - 1.0) * e_omega * e_omega.transpose();
}

EffectiveOperatorK build_K(const MiniwellGeometry& g, const MinimizerReport& report, const Moments1D& moments) {
  EffectiveOperatorK K;
  K.k = report.k;
  K.alpha_min = report.alpha_min;
  K.c_omega = 0.5 * report.d2;
  K.e_omega = g.omega01 / g.omega_min();
  K.Omega = build_Omega(g, report.k, report);
  K.A_const = build_A(g, report.k, report, moments);
  return K;
}

std::string to_string(KSpectrum::Branch b) {
  return b == KSpectrum::Branch::Nondegenerate ? "nondegenerate" : "degenerate";
}

namespace {

void check_operator(const EffectiveOperatorK& K) {
  const int d = K.dim();
  if (d < 1) throw InvalidInput("K: dimension must be at least 1");
  if (K.Omega.rows() != d || K.Omega.cols() != d) throw InvalidInput("K: Omega has wrong shape");
  if (std::abs(K.e_omega.norm() - 1.0) > 1e-12) throw InvalidInput("K: e_omega must be a unit vector");
  if (!std::isfinite(K.c_omega)) throw InvalidInput("K: c_omega is not finite");
  if (K.c_omega < 0.0) {
    throw NumericalError("K: c_omega < 0 contradicts the minimality of lambda0 at alpha_min");
  }
  if ((K.Omega - K.Omega.transpose()).norm() > 1e-12 * std::max(1.0, K.Omega.norm())) {
    throw InvalidInput("K: Omega is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K.Omega);
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw NumericalError("K: Omega is not positive definite");
}

// Orthonormal basis of the complement of the unit vector e (columns).
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& e) {
  const int d = static_cast<int>(e.size());
  Eigen::MatrixXd m(d, d);
  m.col(0) = e;
  // Pick the identity columns least aligned with e so the QR is well conditioned.
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(e[a]) < std::abs(e[b]); });
  for (int i = 0; i + 1 < d; ++i) m.col(i + 1) = Eigen::VectorXd::Unit(d, order[i]);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(d - 1);
}

std::vector<double> sqrt_eigs(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  if (m.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::sqrt(std::max(0.0, es.eigenvalues()[i])));
  return out;
}

}  // namespace

KSpectrum spectrum_K(const EffectiveOperatorK& K, int count) {
  if (count < 1) throw InvalidInput("spectrum_K: count must be positive");
  check_operator(K);
  const int d = K.dim();
  KSpectrum s;
  s.A_const = K.A_const;
  s.imag_A_warning = std::abs(K.A_const.imag()) > 1e-8;
  const double re_a = K.A_const.real();

  if (K.c_omega == 0.0) {
    s.branch = KSpectrum::Branch::Degenerate;
    if (d > 1) {
      const Eigen::MatrixXd basis = complement_basis(K.e_omega);
      s.k0_frequencies = sqrt_eigs(basis.transpose() * K.Omega * basis);
    }
    // e' is Omega-orthogonal to e_omega^perp and normalized by e'.e_omega = 1.
    Eigen::VectorXd ep = K.Omega.ldlt().solve(K.e_omega);
    ep /= ep.dot(K.e_omega);
    s.e_omega_prime = ep;
    s.omega_prime_11 = ep.dot(K.Omega * ep);
    double b = re_a;
    for (double f : s.k0_frequencies) b += f;
    s.bottom = b;
    return s;
  }

  s.branch = KSpectrum::Branch::Nondegenerate;
  const Eigen::MatrixXd root_m =
      Eigen::MatrixXd::Identity(d, d) + (std::sqrt(K.c_omega) - 1.0) * K.e_omega * K.e_omega.transpose();
  s.frequencies = sqrt_eigs(root_m * K.Omega * root_m);

  // Best-first enumeration; each multi-index is generated once by only
  // incrementing coordinates at or after the last one incremented.
  struct Node {
    double energy;
    std::vector<int> n;
    int last;
  };
  auto cmp = [](const Node& a, const Node& b) {
    if (a.energy != b.energy) return a.energy > b.energy;
    return a.n > b.n;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> queue(cmp);
  auto energy_of = [&](const std::vector<int>& n) {
    double e = re_a;
    for (int j = 0; j < d; ++j) e += (2.0 * n[j] + 1.0) * s.frequencies[j];
    return e;
  };
  std::vector<int> zero(d, 0);
  queue.push({energy_of(zero), zero, 0});
  while (static_cast<int>(s.levels.size()) < count) {
    Node top = queue.top();
    queue.pop();
    s.levels.push_back(top.energy);
    s.multi_indices.push_back(top.n);
    for (int j = top.last; j < d; ++j) {
      Node next{0.0, top.n, j};
      ++next.n[j];
      next.energy = energy_of(next.n);
      queue.push(std::move(next));
    }
  }
  s.bottom = s.levels.front();
  return s;
}

namespace {

struct Box2D {
  int nx = 0;  // points including the Dirichlet ends
  int ny = 0;
  double bx = 0.0;
  double by = 0.0;
};

// -c d_xx - d_yy + w11 x^2 + 2 w12 x y + w22 y^2 on the interior of the box.
Eigen::SparseMatrix<double> assemble_k2(const Box2D& box, double c, const Eigen::Matrix2d& w) {
  const int mx = box.nx - 2;
  const int my = box.ny - 2;
  const double dx = 2.0 * box.bx / (box.nx - 1);
  const double dy = 2.0 * box.by / (box.ny - 1);
  auto idx = [my](int i, int j) { return i * my + j; };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mx) * my * 5);
  for (int i = 0; i < mx; ++i) {
    const double x = -box.bx + (i + 1) * dx;
    for (int j = 0; j < my; ++j) {
      const double y = -box.by + (j + 1) * dy;
      const double v = w(0, 0) * x * x + 2.0 * w(0, 1) * x * y + w(1, 1) * y * y;
      trip.emplace_back(idx(i, j), idx(i, j), 2.0 * c / (dx * dx) + 2.0 / (dy * dy) + v);
      if (c != 0.0) {
        if (i > 0) trip.emplace_back(idx(i, j), idx(i - 1, j), -c / (dx * dx));
        if (i + 1 < mx) trip.emplace_back(idx(i, j), idx(i + 1, j), -c / (dx * dx));
      }
      if (j > 0) trip.emplace_back(idx(i, j), idx(i, j - 1), -1.0 / (dy * dy));
      if (j + 1 < my) trip.emplace_back(idx(i, j), idx(i, j + 1), -1.0 / (dy * dy));
    }
  }
  Eigen::SparseMatrix<double> h(mx * my, mx * my);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

std::vector<double> lowest_2d(const Box2D& box, double c, const Eigen::Matrix2d& w, int count) {
  if (c == 0.0) {
    // No coupling along x: the matrix is block diagonal in the x index.
    const double dx = 2.0 * box.bx / (box.nx - 1);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < box.nx; ++i) {
      const double x = -box.bx + i * dx;
      const auto column = assemble([&](double y) { return w(0, 0) * x * x + 2.0 * w(0, 1) * x * y + w(1, 1) * y * y; },
                                   Grid1D(box.by, box.ny));
      best = std::min(best, lowest_eigenpairs(column, 1, 1e-13).eigenvalues[0]);
    }
    return {best};
  }
  const auto h = assemble_k2(box, c, w);
  SparseEigenOptions opt;
  opt.tol = 1e-9;
  return lowest_eigenpairs_sparse(h, count, opt).values;
}

int odd_points(double half_width, double spacing) {
  int n = 2 * static_cast<int>(std::ceil(half_width / spacing)) + 1;
  return std::max(n, 9);
}

}  // namespace

OracleResult spectrum_K_oracle(const EffectiveOperatorK& K, int count, const OracleGrid& grid) {
  check_operator(K);
  if (count < 1) throw InvalidInput("spectrum_K_oracle: count must be positive");
  const int d = K.dim();
  if (d > 2) throw InvalidInput("spectrum_K_oracle: only n-1 <= 2 is supported");
  const double re_a = K.A_const.real();
  const bool degenerate = K.c_omega == 0.0;
  if (degenerate) count = 1;
  const double box_lengths = grid.box_lengths > 0.0 ? grid.box_lengths : std::sqrt(2.0 * count + 1.0) + 5.0;
  OracleResult out;

  if (d == 1) {
    const double w = K.Omega(0, 0);
    if (degenerate) {
      // Pure multiplication operator: spectrum [Re A, inf).
      out.levels = out.coarse = out.fine = {re_a};
      return out;
    }
    // c (-u'' + (w/c) s^2 u); each level converged on its own grid sequence.
    const double ratio = w / K.c_omega;
    for (int m = 0; m < count; ++m) {
      const auto conv = eigenvalue_converged([ratio](double s) { return ratio * s * s; }, m, 1e-10);
      out.levels.push_back(re_a + K.c_omega * conv.value);
      out.fine.push_back(re_a + K.c_omega * conv.spectrum.eigenvalues[m]);
    }
    out.coarse = out.fine;
    return out;
  }

  // Rotate to x along e_omega, y along its complement.
  Eigen::Matrix2d r;
  r.col(0) = K.e_omega;
  r.col(1) = Eigen::Vector2d(-K.e_omega[1], K.e_omega[0]);
  const Eigen::Matrix2d w = r.transpose() * K.Omega * r;
  const Eigen::Matrix2d winv = w.inverse();
  const double ly_soft = std::pow(winv(1, 1), 0.25);
  const double ly_stiff = std::pow(1.0 / w(1, 1), 0.25);
  const double dy = ly_stiff / grid.points_per_length;
  double lx_soft, dx;
  if (degenerate) {
    lx_soft = ly_soft;
    dx = dy;
  } else {
    lx_soft = std::pow(K.c_omega * winv(0, 0), 0.25);
    dx = std::pow(K.c_omega / w(0, 0), 0.25) / grid.points_per_length;
  }
  Box2D coarse;
  coarse.bx = box_lengths * lx_soft;
  coarse.by = box_lengths * ly_soft;
  coarse.nx = odd_points(coarse.bx, dx);
  coarse.ny = odd_points(coarse.by, dy);
  Box2D fine = coarse;
  fine.nx = 2 * coarse.nx - 1;
  fine.ny = 2 * coarse.ny - 1;
  const long unknowns = static_cast<long>(fine.nx - 2) * (fine.ny - 2);
  if (unknowns > grid.max_unknowns) {
    std::ostringstream msg;
    msg << "spectrum_K_oracle: fine grid needs " << unknowns << " unknowns (budget " << grid.max_unknowns
        << "); Omega is too anisotropic for the requested resolution";
    throw NumericalError(msg.str());
  }
  out.n_x = coarse.nx - 2;
  out.n_y = coarse.ny - 2;
  out.coarse = lowest_2d(coarse, K.c_omega, w, count);
  out.fine = lowest_2d(fine, K.c_omega, w, count);
  for (int m = 0; m < count; ++m) {
    const double diff = std::abs(out.fine[m] - out.coarse[m]);
    if (diff > 0.05 * std::max(1.0, std::abs(out.fine[m]))) {
      std::ostringstream msg;
      msg << "spectrum_K_oracle: grid too coarse; level " << m << " moved by " << diff << " under refinement";
      throw NumericalError(msg.str());
    }
    out.levels.push_back(re_a + (4.0 * out.fine[m] - out.coarse[m]) / 3.0);
    out.coarse[m] += re_a;
    out.fine[m] += re_a;
  }
  return out;
}

nlohmann::json to_json(const EffectiveOperatorK& K) {
  return {{"k", K.k},
          {"alpha_min", K.alpha_min},
          {"c_omega", K.c_omega},
          {"e_omega", vector_json(K.e_omega)},
          {"Omega", matrix_json(K.Omega)},
          {"A", complex_json(K.A_const)}};
}

nlohmann::json to_json(const KSpectrum& s) {
  nlohmann::json j{{"branch", to_string(s.branch)},
                   {"A", complex_json(s.A_const)},
                   {"imag_A_warning", s.imag_A_warning},
                   {"bottom", s.bottom}};
  if (s.branch == KSpectrum::Branch::Nondegenerate) {
    j["levels"] = s.levels;
    j["multi_indices"] = s.multi_indices;
    j["frequencies"] = s.frequencies;
  } else {
    j["half_line"] = true;
    j["k0_frequencies"] = s.k0_frequencies;
    j["e_omega_prime"] = vector_json(s.e_omega_prime);
    j["omega_prime_11"] = s.omega_prime_11;
  }
  return j;
}

}  // namespace magwell
