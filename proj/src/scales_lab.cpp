#include "edgespec/scales_lab.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "edgespec/errors.hpp"

namespace edgespec::scales {

namespace {

constexpr double kSlack = 1e-10;

double lambda_min(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Eigen::MatrixXd spectral_power(const Eigen::MatrixXd& m, double s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  Eigen::VectorXd p = es.eigenvalues().array().pow(s);
  return es.eigenvectors() * p.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) { return random_matrix(n, 1, rng).col(0); }

}  // namespace

ScaleGenerator::ScaleGenerator(Eigen::MatrixXd lambda) : lambda_(std::move(lambda)) {
  if (lambda_.rows() == 0 || lambda_.rows() != lambda_.cols()) throw InputError("ScaleGenerator: need a square matrix");
  if (!lambda_.allFinite()) throw InputError("ScaleGenerator: nonfinite entries");
  double scale = std::max(1.0, lambda_.cwiseAbs().maxCoeff());
  if ((lambda_ - lambda_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InputError("ScaleGenerator: matrix is not symmetric");
  lambda_ = 0.5 * (lambda_ + lambda_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lambda_);
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
  if (evals_(0) < 1.0 - 1e-12) {
    std::ostringstream os;
    os << "ScaleGenerator: smallest eigenvalue " << evals_(0) << " is below 1";
    throw InputError(os.str());
  }
}

Eigen::MatrixXd ScaleGenerator::power(double s) const {
  Eigen::VectorXd p = evals_.array().pow(s);
  return evecs_ * p.asDiagonal() * evecs_.transpose();
}

ScaleGenerator random_generator(Eigen::Index d, std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(d, d, rng));
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd ev(d);
  for (Eigen::Index i = 0; i < d; ++i) ev(i) = 1.0 + spread * u(rng);
  Eigen::MatrixXd m = q * ev.asDiagonal() * q.transpose();
  return ScaleGenerator(0.5 * (m + m.transpose()));
}

double scale_norm(const ScaleGenerator& g, double s, const Eigen::VectorXd& x) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("scale_norm: s must be nonnegative");
  if (x.size() != g.dim()) throw ConfigError("scale_norm: dimension mismatch");
  // |Lambda^s x| = |diag(ev^s) V^T x|
  Eigen::VectorXd c = g.eigenvectors().transpose() * x;
  return (g.eigenvalues().array().pow(s) * c.array()).matrix().norm();
}

ScaleGenerator tensor_generator(const ScaleGenerator& g1, const ScaleGenerator& g2) {
  auto d = static_cast<std::size_t>(g1.dim()) * static_cast<std::size_t>(g2.dim());
  if (d > kMaxTensorDim)
    throw ConfigError("tensor_generator: dimension " + std::to_string(d) + " exceeds " + std::to_string(kMaxTensorDim));
  return ScaleGenerator(kron(g1.matrix(), g2.matrix()));
}

TensorPowerReport tensor_power_identity(const ScaleGenerator& g1, const ScaleGenerator& g2,
                                        const std::vector<double>& s_values) {
  auto t = tensor_generator(g1, g2);
  TensorPowerReport r;
  r.s_values = s_values;
  r.lambda_min = t.eigenvalues()(0);
  r.lambda_min_product = g1.eigenvalues()(0) * g2.eigenvalues()(0);
  for (double s : s_values) {
    if (!(s >= 0.0)) throw ConfigError("tensor_power_identity: s must be nonnegative");
    Eigen::MatrixXd rhs = kron(g1.power(s), g2.power(s));
    double e = (t.power(s) - rhs).norm() / rhs.norm();
    r.rel_errors.push_back(e);
    r.max_rel_error = std::max(r.max_rel_error, e);
  }
  return r;
}

IntersectionReport intersection_scale_check(const ScaleGenerator& g1, const ScaleGenerator& g2, double s,
                                            double theta, int trials, std::uint64_t seed) {
  if (!(s >= 0.0)) throw ConfigError("intersection_scale_check: s must be nonnegative");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("intersection_scale_check: theta must lie in [0, 1]");
  if (trials < 0) throw ConfigError("intersection_scale_check: trials must be nonnegative");
  const Eigen::Index d1 = g1.dim(), d2 = g2.dim();
  if (static_cast<std::size_t>(d1 * d2) > kMaxTensorDim) throw ConfigError("intersection_scale_check: too large");
  const Eigen::MatrixXd i1 = Eigen::MatrixXd::Identity(d1, d1), i2 = Eigen::MatrixXd::Identity(d2, d2);
  const Eigen::MatrixXd a = kron(g1.power(s), i2), b = kron(i1, g2.power(s));
  const Eigen::MatrixXd cs = spectral_power(kron(g1.matrix(), i2) + kron(i1, g2.matrix()), s);
  const Eigen::MatrixXd mixed = kron(g1.power(theta * s), g2.power((1.0 - theta) * s));
  std::mt19937_64 rng(seed);
  IntersectionReport r;
  r.trials = trials;
  r.worst_lower = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd x = random_vector(d1 * d2, rng);
    double base = (a * x).squaredNorm() + (b * x).squaredNorm();
    double c2 = (cs * x).squaredNorm();
    double lower = c2 / (0.5 * base);
    double upper = c2 / (std::pow(4.0, s) * base);
    double th = (mixed * x).norm() / std::sqrt(c2);
    r.worst_lower = std::min(r.worst_lower, lower);
    r.worst_upper = std::max(r.worst_upper, upper);
    r.worst_theta = std::max(r.worst_theta, th);
    if (lower < 1.0 - kSlack || upper > 1.0 + kSlack) ++r.sandwich_violations;
    if (th > 1.0 + kSlack) ++r.theta_violations;
  }
  if (trials == 0) r.worst_lower = 0.0;
  return r;
}

Eigen::MatrixXd BlockMatrix::assemble() const {
  validate();
  const auto nn = static_cast<Eigen::Index>(n());
  const Eigen::Index dd = d();
  Eigen::MatrixXd m(nn * dd, nn * dd);
  for (Eigen::Index i = 0; i < nn; ++i)
    for (Eigen::Index j = 0; j < nn; ++j) m.block(i * dd, j * dd, dd, dd) = blocks[i][j];
  return m;
}

void BlockMatrix::validate() const {
  if (blocks.empty()) throw ConfigError("BlockMatrix: no blocks");
  const Eigen::Index dd = blocks[0][0].rows();
  for (const auto& row : blocks) {
    if (row.size() != blocks.size()) throw ConfigError("BlockMatrix: block array must be square");
    for (const auto& b : row)
      if (b.rows() != dd || b.cols() != dd) throw ConfigError("BlockMatrix: inconsistent block sizes");
  }
}

BlockMatrix BlockMatrix::from_matrix(const Eigen::MatrixXd& m, std::size_t n) {
  if (n == 0 || m.rows() != m.cols() || m.rows() % static_cast<Eigen::Index>(n) != 0)
    throw ConfigError("BlockMatrix::from_matrix: size is not a multiple of n");
  const Eigen::Index dd = m.rows() / static_cast<Eigen::Index>(n);
  BlockMatrix b;
  b.blocks.assign(n, std::vector<Eigen::MatrixXd>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      b.blocks[i][j] = m.block(static_cast<Eigen::Index>(i) * dd, static_cast<Eigen::Index>(j) * dd, dd, dd);
  return b;
}

BlockMatrix random_psd(std::size_t n, Eigen::Index d, std::uint64_t seed, Eigen::Index rank) {
  std::mt19937_64 rng(seed);
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * d;
  Eigen::MatrixXd g = random_matrix(dim, rank > 0 ? rank : dim, rng);
  Eigen::MatrixXd m = g * g.transpose() / static_cast<double>(g.cols());
  return BlockMatrix::from_matrix(0.5 * (m + m.transpose()), n);
}

Eigen::MatrixXd block_tensor(const BlockMatrix& a, const BlockMatrix& b) {
  a.validate();
  b.validate();
  if (a.n() != b.n()) throw ConfigError("block_tensor: block counts differ");
  const auto n = static_cast<Eigen::Index>(a.n());
  const Eigen::Index dd = a.d() * b.d();
  Eigen::MatrixXd m(n * dd, n * dd);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m.block(i * dd, j * dd, dd, dd) = kron(a.blocks[i][j], b.blocks[i][j]);
  return m;
}

Eigen::MatrixXd summed_tensor(const BlockMatrix& a, const BlockMatrix& b) {
  a.validate();
  b.validate();
  if (a.n() != b.n()) throw ConfigError("summed_tensor: block counts differ");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.d() * b.d(), a.d() * b.d());
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = 0; j < a.n(); ++j) m += kron(a.blocks[i][j], b.blocks[i][j]);
  return m;
}

PositivityReport tensor_positivity_check(const BlockMatrix& a, const BlockMatrix& b, int trials, std::uint64_t seed) {
  const Eigen::MatrixXd am = a.assemble(), bm = b.assemble();
  if ((am - am.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, am.cwiseAbs().maxCoeff()) ||
      lambda_min(am) < -kSlack)
    throw InputError("tensor_positivity_check: a is not positive semidefinite");
  if ((bm - bm.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, bm.cwiseAbs().maxCoeff()) ||
      lambda_min(bm) < -kSlack)
    throw InputError("tensor_positivity_check: b is not positive semidefinite");
  PositivityReport r;
  r.trials = trials;
  const Eigen::MatrixXd ab = block_tensor(a, b);
  r.block_tensor_min = lambda_min(ab);
  r.summed_min = lambda_min(summed_tensor(a, b));
  r.monotone_min = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    auto p = random_psd(a.n(), a.d(), seed + 2 * static_cast<std::uint64_t>(t));
    auto q = random_psd(b.n(), b.d(), seed + 2 * static_cast<std::uint64_t>(t) + 1);
    auto c = BlockMatrix::from_matrix(am + p.assemble(), a.n());
    auto d = BlockMatrix::from_matrix(bm + q.assemble(), b.n());
    r.monotone_min = std::min(r.monotone_min, lambda_min(block_tensor(c, d) - ab));
  }
  if (trials == 0) r.monotone_min = 0.0;
  return r;
}

SameScaleReport same_scale_demo(double a, double length, int n, int modes) {
  if (!std::isfinite(a)) throw ConfigError("same_scale_demo: a must be finite");
  if (!(length > 0.0)) throw ConfigError("same_scale_demo: length must be positive");
  if (n < 16) throw ConfigError("same_scale_demo: n must be at least 16");
  if (modes < 1 || modes > n / 4) throw ConfigError("same_scale_demo: bad mode count");
  const double h = length / n;
  // f1 at j h, j = 1..n-1; f2 at (k + 1/2) h, k = 0..n-1.
  // (-d/dx + a) f1 at midpoints: -G f1 + a P f1.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n - 1);
  for (int k = 0; k < n; ++k) {
    // neighbours j = k (left) and j = k + 1 (right); index j - 1
    if (k >= 1) m(k, k - 1) += 1.0 / h + 0.5 * a;
    if (k + 1 <= n - 1) m(k, k) += -1.0 / h + 0.5 * a;
  }
  // Lambda2^2 on the f2 block is m m^T.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m * m.transpose());
  SameScaleReport rep;
  rep.a = a;
  rep.length = length;
  rep.n = n;
  for (int i = 0; i < modes; ++i) {
    Eigen::VectorXd f = es.eigenvectors().col(i);
    // cubic through the first four midpoints, evaluated at 0
    double t[4], v[4];
    for (int j = 0; j < 4; ++j) {
      t[j] = (j + 0.5) * h;
      v[j] = f(j);
    }
    double f0 = 0.0, d0 = 0.0;
    for (int j = 0; j < 4; ++j) {
      double l = 1.0, dl = 0.0;
      for (int k = 0; k < 4; ++k) {
        if (k == j) continue;
        double den = t[j] - t[k];
        dl = dl * (0.0 - t[k]) / den + l / den;
        l *= (0.0 - t[k]) / den;
      }
      f0 += l * v[j];
      d0 += dl * v[j];
    }
    double sup = f.cwiseAbs().maxCoeff();
    rep.modes.push_back({es.eigenvalues()(i), std::abs(d0) / sup, std::abs(d0 + a * f0) / sup});
  }
  return rep;
}

}  // namespace edgespec::scales
