#include "edgespec/gb_algebra.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Sparse>

#include "edgespec/errors.hpp"
#include "edgespec/halfline.hpp"
#include "edgespec/model_operators.hpp"

namespace edgespec::gb {

namespace {

void same_shape(const CliffordMatrix& a, const CliffordMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError(std::string("CliffordMatrix ") + op + ": shape mismatch");
}

Rational binom(int n, int k) {
  Rational r(1);
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// d^k/dx^k x^-r = falling(-r, k) x^-(r+k)
Rational falling(int r, int k) {
  Rational f(1);
  for (int i = 0; i < k; ++i) f *= Rational(-r - i);
  return f;
}

}  // namespace

CliffordMatrix CliffordMatrix::from_rows(const std::vector<std::vector<GaussRational>>& rows) {
  if (rows.empty()) return {};
  CliffordMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw ConfigError("CliffordMatrix: ragged rows");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

CliffordMatrix CliffordMatrix::identity(std::size_t n) {
  CliffordMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

CliffordMatrix CliffordMatrix::diagonal(const std::vector<Rational>& d) {
  CliffordMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = GaussRational(d[i]);
  return m;
}

CliffordMatrix CliffordMatrix::transpose() const {
  CliffordMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool CliffordMatrix::is_zero() const {
  for (const auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

bool CliffordMatrix::is_real() const {
  for (const auto& x : a_)
    if (x.im != 0) return false;
  return true;
}

double CliffordMatrix::real_entry(std::size_t i, std::size_t j) const {
  const auto& x = (*this)(i, j);
  if (x.im != 0) throw NumericalError("CliffordMatrix: entry is not real");
  return static_cast<double>(x.re);
}

CliffordMatrix operator+(const CliffordMatrix& a, const CliffordMatrix& b) {
  same_shape(a, b, "+");
  CliffordMatrix c(a.rows_, a.cols_);
  for (std::size_t k = 0; k < a.a_.size(); ++k) c.a_[k] = a.a_[k] + b.a_[k];
  return c;
}

CliffordMatrix operator-(const CliffordMatrix& a, const CliffordMatrix& b) {
  same_shape(a, b, "-");
  CliffordMatrix c(a.rows_, a.cols_);
  for (std::size_t k = 0; k < a.a_.size(); ++k) c.a_[k] = a.a_[k] - b.a_[k];
  return c;
}

CliffordMatrix operator-(const CliffordMatrix& a) {
  CliffordMatrix c(a.rows_, a.cols_);
  for (std::size_t k = 0; k < a.a_.size(); ++k) c.a_[k] = -a.a_[k];
  return c;
}

CliffordMatrix operator*(const CliffordMatrix& a, const CliffordMatrix& b) {
  if (a.cols_ != b.rows_) throw ConfigError("CliffordMatrix *: shape mismatch");
  CliffordMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const auto& x = a(i, k);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols_; ++j)
        if (!b(k, j).is_zero()) c(i, j) = c(i, j) + x * b(k, j);
    }
  return c;
}

CliffordMatrix operator*(const GaussRational& s, const CliffordMatrix& a) {
  CliffordMatrix c(a.rows_, a.cols_);
  for (std::size_t k = 0; k < a.a_.size(); ++k) c.a_[k] = s * a.a_[k];
  return c;
}

bool operator==(const CliffordMatrix& a, const CliffordMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
}

CliffordMatrix kron(const CliffordMatrix& a, const CliffordMatrix& b) {
  CliffordMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j).is_zero()) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) c(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    }
  return c;
}

std::string to_string(const CliffordMatrix& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? "; " : "");
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto& x = m(i, j);
      os << (j ? " " : "");
      if (x.im == 0) os << x.re;
      else if (x.re == 0) os << x.im << "i";
      else os << "(" << x.re << (x.im > 0 ? "+" : "") << x.im << "i)";
    }
  }
  os << "]";
  return os.str();
}

CliffordSet build_clifford() {
  CliffordSet c;
  c.sigma1 = CliffordMatrix::from_rows({{0, -1}, {1, 0}});
  c.sigma2 = CliffordMatrix::from_rows({{0, kI}, {kI, 0}});
  c.omega = kI * (c.sigma1 * c.sigma2);
  c.gamma = kron(c.sigma1, c.omega);
  c.s_sign = kron(c.omega, c.omega);
  c.t_sign = kron(c.sigma1, c.sigma1);
  c.grading = CliffordMatrix::diagonal({1, 1, -1, -1});
  return c;
}

CommutatorReport commutator_report() {
  auto c = build_clifford();
  CommutatorReport r;
  r.gamma_s = c.gamma * c.s_sign + c.s_sign * c.gamma;
  r.gamma_t = c.gamma * c.t_sign + c.t_sign * c.gamma;
  r.t_s = c.t_sign * c.s_sign - c.s_sign * c.t_sign;
  r.grading = c.grading * c.gamma + c.gamma * c.grading;
  return r;
}

StructureReport structure_report() {
  auto c = build_clifford();
  const auto i2 = CliffordMatrix::identity(2), i4 = CliffordMatrix::identity(4);
  StructureReport r;
  r.gamma_square_minus_identity = c.gamma * c.gamma == -i4;
  r.gamma_skew = c.gamma.transpose() == -c.gamma;
  r.gamma_orthogonal = c.gamma.transpose() * c.gamma == i4;
  r.sign_matrices_involutive = c.s_sign * c.s_sign == i4 && c.t_sign * c.t_sign == i4;
  r.omega_from_sigmas = c.omega == CliffordMatrix::diagonal({1, -1}) && c.sigma1 * c.sigma1 == -i2;
  r.gamma_from_kron = c.gamma == CliffordMatrix::from_rows({{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}});
  return r;
}

void ModelEdgeDirac::validate() const {
  if (a_spectrum.empty()) throw InputError("ModelEdgeDirac: empty fiber");
  if (a_spectrum.size() != dy_spectrum.size()) throw InputError("ModelEdgeDirac: A and D^Y need the same basis size");
  for (double v : a_spectrum)
    if (!std::isfinite(v)) throw InputError("ModelEdgeDirac: nonfinite A eigenvalue");
  for (double v : dy_spectrum)
    if (!std::isfinite(v)) throw InputError("ModelEdgeDirac: nonfinite D^Y eigenvalue");
}

namespace {

// Doubles are binary rationals, so the conversion is exact.
std::vector<Rational> exact(const std::vector<double>& v) {
  std::vector<Rational> r;
  for (double x : v) r.emplace_back(x);
  return r;
}

}  // namespace

CliffordMatrix ModelEdgeDirac::s_matrix() const {
  validate();
  return kron(build_clifford().s_sign, CliffordMatrix::diagonal(exact(a_spectrum)));
}

CliffordMatrix ModelEdgeDirac::t_matrix() const {
  validate();
  return kron(build_clifford().t_sign, CliffordMatrix::diagonal(exact(dy_spectrum)));
}

CliffordMatrix ModelEdgeDirac::gamma_matrix() const {
  validate();
  return kron(build_clifford().gamma, CliffordMatrix::identity(fiber_size()));
}

void OperatorPolynomial::add(int x_power, int d_order, const CliffordMatrix& c) {
  if (c.rows() != dim_ || c.cols() != dim_) throw ConfigError("OperatorPolynomial: coefficient size mismatch");
  if (x_power < 0 || d_order < 0) throw ConfigError("OperatorPolynomial: negative exponent");
  auto key = std::make_pair(x_power, d_order);
  auto it = terms_.find(key);
  if (it == terms_.end()) terms_.emplace(key, c);
  else it->second = it->second + c;
  prune();
}

void OperatorPolynomial::prune() {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
}

OperatorPolynomial OperatorPolynomial::compose(const OperatorPolynomial& rhs) const {
  if (rhs.dim_ != dim_) throw ConfigError("OperatorPolynomial: dimension mismatch");
  OperatorPolynomial out(dim_);
  // (C X^-p d^q)(E X^-r d^s) = sum_k C(q,k) falling(r,k) C E X^-(p+r+k) d^(q-k+s)
  for (const auto& [k1, c] : terms_)
    for (const auto& [k2, e] : rhs.terms_) {
      auto ce = c * e;
      if (ce.is_zero()) continue;
      auto [p, q] = k1;
      auto [r, s] = k2;
      for (int k = 0; k <= q; ++k) {
        Rational f = binom(q, k) * falling(r, k);
        if (f == 0) continue;
        out.add(p + r + k, q - k + s, GaussRational(f) * ce);
      }
    }
  return out;
}

OperatorPolynomial OperatorPolynomial::operator+(const OperatorPolynomial& rhs) const {
  OperatorPolynomial out = *this;
  for (const auto& [k, c] : rhs.terms_) out.add(k.first, k.second, c);
  return out;
}

CliffordMatrix OperatorPolynomial::coefficient(int x_power, int d_order) const {
  auto it = terms_.find({x_power, d_order});
  return it == terms_.end() ? CliffordMatrix::zero(dim_) : it->second;
}

bool OperatorPolynomial::operator==(const OperatorPolynomial& rhs) const {
  return dim_ == rhs.dim_ && terms_ == rhs.terms_;
}

SymbolicSquareReport symbolic_square(const ModelEdgeDirac& model) {
  const auto g = model.gamma_matrix(), s = model.s_matrix(), t = model.t_matrix();
  const std::size_t dim = g.rows();
  const auto id = CliffordMatrix::identity(dim);
  OperatorPolynomial d(dim);
  d.add(0, 1, g);
  d.add(1, 0, g * s);
  d.add(0, 0, t);
  SymbolicSquareReport r;
  r.square = d.compose(d);
  r.expected = OperatorPolynomial(dim);
  r.expected.add(0, 2, -id);
  r.expected.add(2, 0, s * (s + id));
  r.expected.add(0, 0, t * t);
  r.identity_holds = r.square == r.expected;

  const auto x2 = r.square.coefficient(2, 0);
  const auto sign = build_clifford().s_sign;
  const auto a = exact(model.a_spectrum);
  bool ok = true;
  const std::size_t f = model.fiber_size();
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      GaussRational want = 0;
      if (i == j) {
        Rational sa = sign(i / f, i / f).re * a[i % f];
        want = GaussRational(sa * (sa + 1));
      }
      if (!(x2(i, j) == want)) ok = false;
    }
  r.componentwise_s_s1 = ok;
  return r;
}

namespace {

using Sparse = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// kron of a small dense exact matrix with an N x N sparse matrix.
Sparse kron_sparse(const CliffordMatrix& c, const Sparse& b) {
  std::vector<Triplet> t;
  const auto n = b.rows();
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      if (c(i, j).is_zero()) continue;
      double v = c.real_entry(i, j);
      for (Eigen::Index k = 0; k < b.outerSize(); ++k)
        for (Sparse::InnerIterator it(b, k); it; ++it)
          t.emplace_back(static_cast<Eigen::Index>(i) * n + it.row(), static_cast<Eigen::Index>(j) * n + it.col(),
                         v * it.value());
    }
  Sparse m(static_cast<Eigen::Index>(c.rows()) * n, static_cast<Eigen::Index>(c.cols()) * n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Sparse diag_sparse(const Eigen::VectorXd& d) {
  Sparse m(d.size(), d.size());
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d(i));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

DiracSquareReport dirac_square_structure(const ModelEdgeDirac& model, const std::function<double(double)>& u,
                                         const std::vector<int>& sizes, double x_min, double x_max) {
  const auto g = model.gamma_matrix(), s = model.s_matrix(), t = model.t_matrix();
  const auto id = CliffordMatrix::identity(g.rows());
  const auto gs = g * s, ss1 = s * (s + id), t2 = t * t;
  const std::size_t dim = g.rows();
  DiracSquareReport rep;
  for (int n : sizes) {
    auto grid = halfline::build_grid(n, x_min, x_max);
    const auto nn = static_cast<Eigen::Index>(grid.size());
    Sparse d1 = halfline::fd_first_difference(grid).sparseView();
    Sparse d2 = halfline::fd_second_difference(grid).sparseView();
    Eigen::VectorXd x = grid.x();
    Sparse inv_x = diag_sparse(x.cwiseInverse()), inv_x2 = diag_sparse(x.array().square().inverse().matrix());
    Sparse eye = diag_sparse(Eigen::VectorXd::Ones(nn));
    Sparse dh = kron_sparse(g, d1) + kron_sparse(gs, inv_x) + kron_sparse(t, eye);
    Sparse direct = kron_sparse(id, d2) + kron_sparse(ss1, inv_x2) + kron_sparse(t2, eye);
    Eigen::VectorXd prof(nn);
    for (Eigen::Index i = 0; i < nn; ++i) prof(i) = u(grid.nodes[i]);
    if (!prof.allFinite()) throw InputError("dirac_square_structure: nonfinite samples");
    auto [lo, hi] = model::interior_range(grid.size());
    double disc = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim) * nn);
      v.segment(static_cast<Eigen::Index>(c) * nn, nn) = prof;
      Eigen::VectorXd diff = dh * (dh * v) - direct * v;
      for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t i = lo; i < hi; ++i)
          disc = std::max(disc, std::abs(diff(static_cast<Eigen::Index>(k) * nn + static_cast<Eigen::Index>(i))));
    }
    rep.levels.push_back({n, disc});
  }
  for (std::size_t i = 1; i < rep.levels.size(); ++i) {
    double a = rep.levels[i - 1].discrepancy, b = rep.levels[i].discrepancy;
    rep.observed_orders.push_back(a > 0.0 && b > 0.0 ? std::log2(a / b) : 0.0);
  }
  return rep;
}

}  // namespace edgespec::gb
