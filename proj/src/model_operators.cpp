#include "edgespec/model_operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "edgespec/errors.hpp"
#include "edgespec/special_functions.hpp"

namespace edgespec::model {

namespace {

using halfline::HalfLineGrid;
using Triplet = Eigen::Triplet<double>;

void check_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw InputError(std::string(what) + ": nonfinite samples");
}

// Three-point -d^2 plus c / x^2 + beta^2, as triplets at offset (r, r).
void push_scalar(std::vector<Triplet>& t, const HalfLineGrid& grid, double c, double beta, Eigen::Index r) {
  const auto& x = grid.nodes;
  const std::size_t n = x.size();
  const double left = x[0] * x[0] / x[1];
  const double right = x[n - 1] * x[n - 1] / x[n - 2];
  for (std::size_t i = 0; i < n; ++i) {
    double xm = i == 0 ? left : x[i - 1];
    double xp = i + 1 == n ? right : x[i + 1];
    double hm = x[i] - xm, hp = xp - x[i];
    double s = 2.0 / (hm + hp);
    Eigen::Index ii = r + static_cast<Eigen::Index>(i);
    t.emplace_back(ii, ii, s * (1.0 / hm + 1.0 / hp) + c / (x[i] * x[i]) + beta * beta);
    if (i > 0) t.emplace_back(ii, ii - 1, -s / hm);
    if (i + 1 < n) t.emplace_back(ii, ii + 1, -s / hp);
  }
}

// sign * (D + m / x) placed at block (r, c).
void push_first(std::vector<Triplet>& t, const HalfLineGrid& grid, double m, double sign, Eigen::Index r,
                Eigen::Index c) {
  const auto& x = grid.nodes;
  const std::size_t n = x.size();
  const double left = x[0] * x[0] / x[1];
  const double right = x[n - 1] * x[n - 1] / x[n - 2];
  for (std::size_t i = 0; i < n; ++i) {
    double xm = i == 0 ? left : x[i - 1];
    double xp = i + 1 == n ? right : x[i + 1];
    double inv = 1.0 / (xp - xm);
    Eigen::Index ri = r + static_cast<Eigen::Index>(i), ci = c + static_cast<Eigen::Index>(i);
    if (i > 0) t.emplace_back(ri, ci - 1, -sign * inv);
    if (i + 1 < n) t.emplace_back(ri, ci + 1, sign * inv);
    t.emplace_back(ri, ci, sign * m / x[i]);
  }
}

void check_grid(const HalfLineGrid& grid) {
  if (grid.size() < 3) throw ConfigError("model: grid needs at least 3 nodes");
}

Eigen::SparseMatrix<double> potential_operator(double c, double beta, const HalfLineGrid& grid) {
  check_grid(grid);
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<Triplet> t;
  push_scalar(t, grid, c, beta, 0);
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

WittReport check_witt(const FiberSpectrum& spec) {
  if (spec.eigenvalues.empty()) throw InputError("check_witt: empty spectrum");
  if (!std::isfinite(spec.gap) || spec.gap < 0.0) throw InputError("check_witt: gap must be finite and nonnegative");
  double m = std::numeric_limits<double>::infinity();
  for (double s : spec.eigenvalues) {
    if (!std::isfinite(s)) throw InputError("check_witt: nonfinite eigenvalue");
    m = std::min(m, std::abs(s));
  }
  WittReport r;
  r.min_abs = m;
  r.passes = m > spec.gap;
  r.implied_nu_floor = m + 0.5;
  r.delta = r.implied_nu_floor - 1.5;
  return r;
}

bool a_identity_exact(long long num, long long den) {
  using boost::multiprecision::cpp_rational;
  if (den == 0) throw InputError("a_identity_exact: zero denominator");
  cpp_rational s(num, den);
  cpp_rational a = abs(s);
  cpp_rational half(1, 2), quarter(1, 4);
  return (a + half) * (a + half) - quarter == s * s + a;
}

ModelBlock ModelBlock::from_eigenvalue(double s, double xi, BlockKind kind) {
  if (!std::isfinite(s) || !std::isfinite(xi)) throw InputError("ModelBlock: nonfinite parameters");
  if (kind == BlockKind::scalar_L2 && xi < 0.0) throw InputError("ModelBlock: scalar block needs xi_norm >= 0");
  return {kind, std::abs(s) + 0.5, xi};
}

kernels::ConeKernel green_kernel(const ModelBlock& block, double delta_min) {
  double beta = std::abs(block.xi_norm);
  if (beta == 0.0) return kernels::ConeKernel::free(block.nu, delta_min);
  return kernels::ConeKernel::bessel(block.nu, beta, delta_min);
}

Eigen::VectorXd solve_scalar(const ModelBlock& block, const Eigen::VectorXd& g, const HalfLineGrid& grid,
                             double delta_min) {
  if (static_cast<std::size_t>(g.size()) != grid.size()) throw ConfigError("solve_scalar: size mismatch");
  check_finite(g, "solve_scalar");
  auto k = green_kernel(block, delta_min);
  auto op = halfline::nystrom_assemble(k, {0, 0}, grid);
  return op.matrix * g;
}

Eigen::SparseMatrix<double> scalar_operator(double nu, double beta, const HalfLineGrid& grid) {
  if (!(nu > 1.5)) throw WittViolation("scalar_operator: nu must exceed 3/2");
  return potential_operator(nu * nu - 0.25, beta, grid);
}

Eigen::SparseMatrix<double> block_operator(double mu, double xi, const HalfLineGrid& grid) {
  check_grid(grid);
  if (!std::isfinite(mu) || !std::isfinite(xi)) throw InputError("block_operator: nonfinite parameters");
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<Triplet> t;
  // row 1: -(D - mu/x) f2 + xi f1;  row 2: (D + mu/x) f1 - xi f2
  push_first(t, grid, -mu, -1.0, 0, n);
  push_first(t, grid, mu, 1.0, n, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, xi);
    t.emplace_back(n + i, n + i, -xi);
  }
  Eigen::SparseMatrix<double> m(2 * n, 2 * n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::VectorXd block_apply(const ModelBlock& block, const Eigen::VectorXd& f, const HalfLineGrid& grid) {
  if (block.kind != BlockKind::block_L) throw ConfigError("block_apply: needs a block_L block");
  if (static_cast<std::size_t>(f.size()) != 2 * grid.size()) throw ConfigError("block_apply: size mismatch");
  check_finite(f, "block_apply");
  return block_operator(block.mu(), block.xi_norm, grid) * f;
}

std::pair<std::size_t, std::size_t> interior_range(std::size_t n) {
  std::size_t cut = n / 10;
  return {cut, n - cut};
}

SquareIdentityReport verify_square_identity(double s, double beta, const std::function<double(double)>& u1,
                                            const std::function<double(double)>& u2, const std::vector<int>& sizes,
                                            double x_min, double x_max) {
  const double mu = std::abs(s);
  SquareIdentityReport rep;
  for (int n : sizes) {
    auto grid = halfline::build_grid(n, x_min, x_max);
    const auto nn = static_cast<Eigen::Index>(grid.size());
    Eigen::VectorXd u(2 * nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
      u(i) = u1(grid.nodes[i]);
      u(nn + i) = u2(grid.nodes[i]);
    }
    check_finite(u, "verify_square_identity");
    auto l = block_operator(mu, beta, grid);
    Eigen::VectorXd twice = l * (l * u);
    Eigen::VectorXd direct(2 * nn);
    direct.head(nn) = potential_operator(mu * (mu + 1.0), beta, grid) * u.head(nn);
    direct.tail(nn) = potential_operator(mu * (mu - 1.0), beta, grid) * u.tail(nn);
    auto [lo, hi] = interior_range(grid.size());
    double d = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      for (Eigen::Index c = 0; c < 2; ++c) {
        Eigen::Index k = c * nn + static_cast<Eigen::Index>(i);
        d = std::max(d, std::abs(twice(k) - direct(k)));
      }
    rep.levels.push_back({n, d});
  }
  for (std::size_t i = 1; i < rep.levels.size(); ++i) {
    double a = rep.levels[i - 1].discrepancy, b = rep.levels[i].discrepancy;
    rep.observed_orders.push_back(a > 0.0 && b > 0.0 ? std::log2(a / b) : 0.0);
  }
  return rep;
}

double median(std::vector<double> v) {
  if (v.empty()) throw InputError("median: empty list");
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

bool uniform(const std::vector<SweepRow>& rows, double SweepRow::*field) {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.*field);
  double med = median(v);
  return *std::max_element(v.begin(), v.end()) <= 1.1 * med;
}

}  // namespace

SweepTable uniform_bound_sweep(const FiberSpectrum& spec, const std::vector<double>& betas,
                               const SweepConfig& config) {
  auto witt = check_witt(spec);
  if (!witt.passes) {
    std::ostringstream os;
    os << "uniform_bound_sweep: spectrum fails the Witt condition (min |s| = " << witt.min_abs << ", gap "
       << spec.gap << ")";
    throw WittViolation(os.str());
  }
  if (betas.empty()) throw InputError("uniform_bound_sweep: no beta values");
  if (!(config.z_cap > 0.0)) throw ConfigError("uniform_bound_sweep: z_cap must be positive");
  std::vector<double> nus;
  for (double s : spec.eigenvalues) nus.push_back(std::abs(s) + 0.5);
  std::sort(nus.begin(), nus.end());
  nus.erase(std::unique(nus.begin(), nus.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
            nus.end());

  SweepTable table;
  for (double nu : nus)
    for (double beta : betas) {
      if (!(beta >= 0.0) || !std::isfinite(beta)) throw InputError("uniform_bound_sweep: beta must be nonnegative");
      SweepRow row;
      row.nu = nu;
      row.beta = beta;
      double right = config.x_max;
      if (beta > 0.0) right = std::min(right, config.z_cap / beta);
      if (!(right > config.x_min)) throw ConfigError("uniform_bound_sweep: window is empty for beta = " +
                                                     std::to_string(beta));
      row.window_max = right;
      auto grid = halfline::build_grid(config.grid_n, config.x_min, right);
      auto k = green_kernel({BlockKind::scalar_L2, nu, beta}, config.delta_min);
      row.norm0 = halfline::operator_norm(halfline::nystrom_assemble(k, {-2, 0}, grid), config.tol);
      row.norm1 = halfline::operator_norm(halfline::nystrom_assemble(k, {-2, 1}, grid), config.tol);
      row.norm2 = halfline::operator_norm(halfline::nystrom_assemble(k, {-2, 2}, grid), config.tol);
      row.schur_ratio = row.norm0 * (nu * nu - 2.25);
      row.nu2_ratio = row.norm0 * nu * nu;
      row.nu1_ratio = row.norm1 * nu;
      table.rows.push_back(row);
    }
  table.schur_uniform = uniform(table.rows, &SweepRow::schur_ratio);
  table.nu2_uniform = uniform(table.rows, &SweepRow::nu2_ratio);
  table.nu1_uniform = uniform(table.rows, &SweepRow::nu1_ratio);
  table.norm2_uniform = uniform(table.rows, &SweepRow::norm2);
  return table;
}

std::vector<WitnessSeries> injectivity_witness(double nu, double beta, int grid_n) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InputError("injectivity_witness: nu must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InputError("injectivity_witness: beta must be nonnegative");
  using special::BesselOrder;
  std::vector<std::function<double(double)>> fns;
  std::vector<std::string> names;
  // beta > 0: windows are in z = beta x, which keeps I_nu finite.
  const double scale = beta > 0.0 ? 1.0 / beta : 1.0;
  if (beta == 0.0) {
    fns.push_back([nu](double x) { return std::pow(x, nu + 0.5); });
    fns.push_back([nu](double x) { return std::pow(x, -nu + 0.5); });
    names = {"x^(nu+1/2)", "x^(-nu+1/2)"};
  } else {
    fns.push_back([nu, beta](double x) { return std::sqrt(x) * special::bessel_i(BesselOrder(nu), beta * x, false).value; });
    fns.push_back([nu, beta](double x) { return std::sqrt(x) * special::bessel_k(BesselOrder(nu), beta * x, false).value; });
    names = {"sqrt(x) I_nu(beta x)", "sqrt(x) K_nu(beta x)"};
  }
  const halfline::SobolevSpec w22{2, 2.0, {}};
  std::vector<WitnessSeries> out;
  for (std::size_t f = 0; f < fns.size(); ++f) {
    WitnessSeries ws;
    ws.name = names[f];
    for (int level = 0; level < 3; ++level) {
      double a = std::pow(10.0, -(2 + level)) * scale, b = 10.0 * std::pow(2.0, level) * scale;
      auto grid = halfline::build_grid(grid_n, a, b);
      Eigen::MatrixXd u(grid.size(), 1);
      for (std::size_t i = 0; i < grid.size(); ++i) u(i, 0) = fns[f](grid.nodes[i]);
      ws.norms.push_back(halfline::sobolev_norm(u, w22, grid));
    }
    ws.diverges = true;
    for (std::size_t i = 1; i < ws.norms.size(); ++i)
      if (!(ws.norms[i] >= 1.25 * ws.norms[i - 1])) ws.diverges = false;
    out.push_back(ws);
  }
  return out;
}

double log_bump(double x, double centre, double half_width) {
  double r = (std::log(x) - std::log(centre)) / half_width;
  if (std::abs(r) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

double round_trip_residual(double nu, double beta, int n, double x_min, double x_max, double delta_min) {
  auto grid = halfline::build_grid(n, x_min, x_max);
  Eigen::VectorXd g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g(i) = log_bump(grid.nodes[i], 1.0, 1.5);
  ModelBlock block{BlockKind::scalar_L2, nu, beta};
  Eigen::VectorXd f = solve_scalar(block, g, grid, delta_min);
  Eigen::VectorXd r = potential_operator(nu * nu - 0.25, beta, grid) * f - g;
  auto [lo, hi] = interior_range(grid.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    num += grid.weights[i] * r(i) * r(i);
    den += grid.weights[i] * g(i) * g(i);
  }
  return std::sqrt(num / den);
}

double decay_sup(double nu, double beta, double delta, int n) {
  auto grid = halfline::build_grid(n, 1e-2, 1.0);
  std::vector<double> u(grid.size());
  double norm2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    u[i] = log_bump(grid.nodes[i], 0.1, std::log(10.0));
    norm2 += grid.weights[i] * u[i] * u[i];
  }
  auto k = green_kernel({BlockKind::scalar_L2, nu, beta});
  double best = 0.0;
  for (int j = 0; j < 200; ++j) {
    double x = 2.0 * std::pow(50.0, j / 199.0);
    auto d = kernels::decay_estimate_check(k, grid.nodes, grid.weights, u, x);
    best = std::max(best, d.value * std::pow(x, 1.0 + delta) * nu);
  }
  return best / std::sqrt(norm2);
}

}  // namespace edgespec::model
