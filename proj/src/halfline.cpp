#include "edgespec/halfline.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "edgespec/errors.hpp"

namespace edgespec::halfline {

namespace {

constexpr int kGregoryOrder = 8;
constexpr double kMaxLogStep = 0.5;
constexpr Eigen::Index kMaxKrylov = 2000;

// Left-end corrections c_j (j < m) for unit-spacing trapezoid sums: the
// weights are 1 - c_j - c_{n-1-j}. The moments sum_j c_j j^k match the
// endpoint terms of the Euler-Maclaurin formula for t^k.
Eigen::VectorXd gregory_corrections(int m) {
  // b_k = 1/2 for k = 0, -B_{k+1}/(k+1) for odd k, 0 otherwise.
  const double bern[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0};
  Eigen::MatrixXd v(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) v(k, j) = std::pow(static_cast<double>(j), k);
    if (k == 0) b(k) = 0.5;
    else if (k % 2 == 1) b(k) = -bern[(k - 1) / 2] / (k + 1);
  }
  return v.fullPivLu().solve(b);
}

void check_grid(const HalfLineGrid& g) {
  if (g.size() < 3) throw ConfigError("grid needs at least 3 nodes");
}

}  // namespace

Eigen::VectorXd HalfLineGrid::x() const { return Eigen::Map<const Eigen::VectorXd>(nodes.data(), nodes.size()); }
Eigen::VectorXd HalfLineGrid::w() const { return Eigen::Map<const Eigen::VectorXd>(weights.data(), weights.size()); }

HalfLineGrid build_grid(int n, double x_min, double x_max, GridScheme scheme) {
  if (n < 16) throw ConfigError("build_grid: n must be at least 16, got " + std::to_string(n));
  if (!(x_min > 0.0) || !(x_max > x_min) || !std::isfinite(x_max))
    throw ConfigError("build_grid: need 0 < x_min < x_max");
  HalfLineGrid g;
  g.scheme = scheme;
  g.x_min = x_min;
  g.x_max = x_max;
  const double la = std::log(x_min), lb = std::log(x_max);
  if (scheme == GridScheme::log_trapezoid) {
    const double h = (lb - la) / (n - 1);
    static const Eigen::VectorXd c = gregory_corrections(kGregoryOrder);
    for (int i = 0; i < n; ++i) {
      double t = (i == n - 1) ? lb : la + i * h;
      double x = (i == 0) ? x_min : (i == n - 1) ? x_max : std::exp(t);
      double gw = 1.0;
      if (i < kGregoryOrder) gw -= c(i);
      if (n - 1 - i < kGregoryOrder) gw -= c(n - 1 - i);
      g.nodes.push_back(x);
      g.weights.push_back(h * gw * x);
    }
  } else {
    if (n % 8 != 0) throw ConfigError("build_grid: log_gauss_panels needs n divisible by 8");
    using G = boost::math::quadrature::gauss<double, 8>;
    std::vector<double> t, w;
    for (std::size_t i = G::abscissa().size(); i-- > 0;) {
      t.push_back(-G::abscissa()[i]);
      w.push_back(G::weights()[i]);
    }
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
      t.push_back(G::abscissa()[i]);
      w.push_back(G::weights()[i]);
    }
    const int panels = n / 8;
    const double h = (lb - la) / panels;
    for (int p = 0; p < panels; ++p) {
      double c = la + (p + 0.5) * h;
      for (std::size_t i = 0; i < t.size(); ++i) {
        double x = std::exp(c + 0.5 * h * t[i]);
        g.nodes.push_back(x);
        g.weights.push_back(0.5 * h * w[i] * x);
      }
    }
  }
  for (double w : g.weights)
    if (!(w > 0.0)) throw NumericalError("build_grid: nonpositive quadrature weight");
  return g;
}

Eigen::VectorXd midpoint_weights(const HalfLineGrid& grid) {
  check_grid(grid);
  const auto& x = grid.nodes;
  const std::size_t n = x.size();
  Eigen::VectorXd w(n);
  double left = x[0] * x[0] / x[1];
  double right = x[n - 1] * x[n - 1] / x[n - 2];
  for (std::size_t i = 0; i < n; ++i) {
    double xm = i == 0 ? left : x[i - 1];
    double xp = i + 1 == n ? right : x[i + 1];
    w(i) = 0.5 * (xp - xm);
  }
  return w;
}

Eigen::MatrixXd DiscreteOperator::adjoint() const {
  const Eigen::VectorXd& w = metric_weights;
  return w.cwiseInverse().asDiagonal() * matrix.transpose() * w.asDiagonal();
}

double weighted_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  return (u.array() * v.array() * w.array()).sum();
}

double weighted_norm(const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
  return std::sqrt(std::max(0.0, weighted_inner(u, u, w)));
}

DiscreteOperator nystrom_assemble(const kernels::ConeKernel& k, const kernels::WeightedAction& a,
                                  const HalfLineGrid& grid) {
  kernels::validate(a);
  check_grid(grid);
  const std::size_t n = grid.size();
  std::vector<kernels::NodeFactors> f;
  f.reserve(n);
  for (double x : grid.nodes) f.push_back(kernels::node_factors(k, x));
  DiscreteOperator op;
  op.grid = grid;
  op.metric_weights = grid.w();
  op.matrix.resize(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) op.matrix(i, j) = kernels::weighted_kernel(k, a, f[i], f[j]) * grid.weights[j];
  for (std::size_t i = 0; i < n; ++i) op.matrix(i, i) += kernels::diagonal_mass(a, grid.nodes[i]);
  return op;
}

Eigen::MatrixXd fd_second_difference(const HalfLineGrid& grid) {
  check_grid(grid);
  const auto& x = grid.nodes;
  const std::size_t n = x.size();
  const double left = x[0] * x[0] / x[1];
  const double right = x[n - 1] * x[n - 1] / x[n - 2];
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double xm = i == 0 ? left : x[i - 1];
    double xp = i + 1 == n ? right : x[i + 1];
    double hm = x[i] - xm, hp = xp - x[i];
    double s = 2.0 / (hm + hp);
    m(i, i) = s * (1.0 / hm + 1.0 / hp);
    if (i > 0) m(i, i - 1) = -s / hm;
    if (i + 1 < n) m(i, i + 1) = -s / hp;
  }
  return m;
}

Eigen::MatrixXd fd_first_difference(const HalfLineGrid& grid) {
  check_grid(grid);
  const auto& x = grid.nodes;
  const std::size_t n = x.size();
  const double left = x[0] * x[0] / x[1];
  const double right = x[n - 1] * x[n - 1] / x[n - 2];
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double xm = i == 0 ? left : x[i - 1];
    double xp = i + 1 == n ? right : x[i + 1];
    double inv = 1.0 / (xp - xm);
    if (i > 0) m(i, i - 1) = -inv;
    if (i + 1 < n) m(i, i + 1) = inv;
  }
  return m;
}

DiscreteOperator fd_assemble_model(double nu, double beta, const HalfLineGrid& grid) {
  if (!(nu > 1.5)) throw WittViolation("fd_assemble_model: nu must exceed 3/2");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("fd_assemble_model: beta must be nonnegative");
  check_grid(grid);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double step = std::log(grid.nodes[i + 1] / grid.nodes[i]);
    if (!(step > 0.0)) throw ConfigError("fd_assemble_model: nodes must be strictly increasing");
    if (step > kMaxLogStep) {
      std::ostringstream os;
      os << "fd_assemble_model: log step " << step << " at x = " << grid.nodes[i]
         << " does not resolve the x^-2 potential (limit " << kMaxLogStep << ")";
      throw NumericalError(os.str());
    }
  }
  DiscreteOperator op;
  op.grid = grid;
  op.metric_weights = midpoint_weights(grid);
  op.matrix = fd_second_difference(grid);
  const double c = nu * nu - 0.25;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double x = grid.nodes[i];
    op.matrix(i, i) += c / (x * x) + beta * beta;
  }
  return op;
}

double operator_norm(const DiscreteOperator& op, double tol) {
  if (!(tol > 0.0)) throw ConfigError("operator_norm: tol must be positive");
  const Eigen::MatrixXd& m = op.matrix;
  const Eigen::VectorXd& w = op.metric_weights;
  if (m.rows() != m.cols() || m.rows() != w.size()) throw ConfigError("operator_norm: size mismatch");
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  // Euclidean form B = W^1/2 M W^-1/2 has the same singular values.
  const Eigen::VectorXd sw = w.array().sqrt();
  const Eigen::MatrixXd b = sw.asDiagonal() * m * sw.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd bt = b.transpose();

  // Lanczos on B^T B from the constant vector, fully reorthogonalized.
  Eigen::MatrixXd v(n, std::min<Eigen::Index>(n, kMaxKrylov) + 1);
  std::vector<double> alpha, beta;
  v.col(0) = sw / sw.norm();
  double lambda = 0.0, resid = 0.0;
  const Eigen::Index kmax = std::min<Eigen::Index>(n, kMaxKrylov);
  for (Eigen::Index j = 0; j < kmax; ++j) {
    Eigen::VectorXd z = bt * (b * v.col(j));
    double a = v.col(j).dot(z);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) z -= v.leftCols(j + 1) * (v.leftCols(j + 1).transpose() * z);
    double bj = z.norm();
    const Eigen::Index k = j + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    lambda = es.eigenvalues()(k - 1);
    resid = bj * std::abs(es.eigenvectors()(k - 1, k - 1));
    if (lambda <= 0.0 && bj == 0.0) return 0.0;
    if (resid <= tol * lambda || bj <= 1e-300) return std::sqrt(std::max(lambda, 0.0));
    beta.push_back(bj);
    v.col(j + 1) = z / bj;
  }
  std::ostringstream os;
  os << "operator_norm: no convergence in " << kmax << " Lanczos steps (ritz value " << lambda << ", residual "
     << resid << ")";
  throw NumericalError(os.str());
}

Eigen::VectorXd edge_derivative(const HalfLineGrid& grid, const Eigen::VectorXd& v) {
  check_grid(grid);
  const std::size_t n = grid.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = std::log(grid.nodes[i]);
  Eigen::VectorXd d(n);
  d(0) = (v(1) - v(0)) / (t[1] - t[0]);
  d(n - 1) = (v(n - 1) - v(n - 2)) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) d(i) = (v(i + 1) - v(i - 1)) / (t[i + 1] - t[i - 1]);
  return d;
}

double sobolev_norm(const Eigen::MatrixXd& u, const SobolevSpec& spec, const HalfLineGrid& grid) {
  if (spec.s < 0 || spec.s > 2) throw ConfigError("sobolev_norm: s must be 0, 1 or 2");
  if (static_cast<std::size_t>(u.rows()) != grid.size()) throw ConfigError("sobolev_norm: row count must match grid");
  if (!spec.fiber_weights.empty() && static_cast<Eigen::Index>(spec.fiber_weights.size()) != u.cols())
    throw ConfigError("sobolev_norm: one fiber weight per column required");
  if (!u.allFinite()) throw InputError("sobolev_norm: nonfinite samples");
  const Eigen::VectorXd w = grid.w();
  const Eigen::ArrayXd shift = grid.x().array().pow(-spec.delta);
  double total = 0.0;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::VectorXd v = (u.col(j).array() * shift).matrix();
    double l2 = weighted_inner(v, v, w);
    Eigen::VectorXd d = v;
    for (int a = 0; a <= spec.s; ++a) {
      total += weighted_inner(d, d, w);
      if (a < spec.s) d = edge_derivative(grid, d);
    }
    if (spec.s >= 1) {
      double nu = spec.fiber_weights.empty() ? 1.0 : spec.fiber_weights[j];
      total += std::pow(nu, 2 * spec.s) * l2;
    }
  }
  return std::sqrt(total);
}

}  // namespace edgespec::halfline
