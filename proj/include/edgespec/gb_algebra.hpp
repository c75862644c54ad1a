#pragma once

// Exact Clifford structure of the model-edge Gauss-Bonnet operator
//   D = Gamma (d/dx + X^-1 S) + T,  S = (omega x omega) x A,  T = (sigma1 x sigma1) x D^Y,
// with A and D^Y commuting diagonal matrices on a finite fiber basis.

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace edgespec::gb {

using Rational = boost::multiprecision::cpp_rational;

// Element of Q[i].
struct GaussRational {
  Rational re{0};
  Rational im{0};

  GaussRational() = default;
  GaussRational(Rational r, Rational i = Rational(0)) : re(std::move(r)), im(std::move(i)) {}
  GaussRational(int r) : re(r) {}

  bool is_zero() const { return re == 0 && im == 0; }
  friend GaussRational operator+(const GaussRational& a, const GaussRational& b) { return {a.re + b.re, a.im + b.im}; }
  friend GaussRational operator-(const GaussRational& a, const GaussRational& b) { return {a.re - b.re, a.im - b.im}; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const GaussRational& a, const GaussRational& b) { return a.re == b.re && a.im == b.im; }
};

inline const GaussRational kI{Rational(0), Rational(1)};

class CliffordMatrix {
 public:
  CliffordMatrix() = default;
  CliffordMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  static CliffordMatrix from_rows(const std::vector<std::vector<GaussRational>>& rows);
  static CliffordMatrix identity(std::size_t n);
  static CliffordMatrix zero(std::size_t n) { return CliffordMatrix(n, n); }
  static CliffordMatrix diagonal(const std::vector<Rational>& d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  GaussRational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const GaussRational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  CliffordMatrix transpose() const;
  bool is_zero() const;
  bool is_real() const;
  // Entry (i, j) as a double; the imaginary part must vanish.
  double real_entry(std::size_t i, std::size_t j) const;

  friend CliffordMatrix operator+(const CliffordMatrix& a, const CliffordMatrix& b);
  friend CliffordMatrix operator-(const CliffordMatrix& a, const CliffordMatrix& b);
  friend CliffordMatrix operator-(const CliffordMatrix& a);
  friend CliffordMatrix operator*(const CliffordMatrix& a, const CliffordMatrix& b);
  friend CliffordMatrix operator*(const GaussRational& s, const CliffordMatrix& a);
  friend bool operator==(const CliffordMatrix& a, const CliffordMatrix& b);

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<GaussRational> a_;
};

CliffordMatrix kron(const CliffordMatrix& a, const CliffordMatrix& b);
std::string to_string(const CliffordMatrix& m);

struct CliffordSet {
  CliffordMatrix sigma1, sigma2, omega;  // 2x2
  CliffordMatrix gamma;                  // sigma1 x omega
  CliffordMatrix s_sign;                 // omega x omega = diag(1, -1, -1, 1)
  CliffordMatrix t_sign;                 // sigma1 x sigma1 (antidiagonal)
  CliffordMatrix grading;                // diag(I2, -I2)
};

// omega is computed as i sigma1 sigma2, not typed in.
CliffordSet build_clifford();

struct CommutatorReport {
  CliffordMatrix gamma_s;  // Gamma S~ + S~ Gamma
  CliffordMatrix gamma_t;  // Gamma T~ + T~ Gamma
  CliffordMatrix t_s;      // T~ S~ - S~ T~
  CliffordMatrix grading;  // G Gamma + Gamma G
  bool all_zero() const { return gamma_s.is_zero() && gamma_t.is_zero() && t_s.is_zero() && grading.is_zero(); }
};

CommutatorReport commutator_report();

struct StructureReport {
  bool gamma_square_minus_identity = false;
  bool gamma_skew = false;
  bool gamma_orthogonal = false;
  bool sign_matrices_involutive = false;  // S~^2 = T~^2 = I, so their eigenvalues are +-1
  bool omega_from_sigmas = false;
  bool gamma_from_kron = false;
  bool all() const {
    return gamma_square_minus_identity && gamma_skew && gamma_orthogonal && sign_matrices_involutive &&
           omega_from_sigmas && gamma_from_kron;
  }
};

StructureReport structure_report();

struct ModelEdgeDirac {
  std::vector<double> a_spectrum;   // eigenvalues of A
  std::vector<double> dy_spectrum;  // eigenvalues of D^Y on the same basis

  std::size_t fiber_size() const { return a_spectrum.size(); }
  // Exact 4F x 4F matrices S = (omega x omega) x A and T = (sigma1 x sigma1) x D^Y.
  CliffordMatrix s_matrix() const;
  CliffordMatrix t_matrix() const;
  CliffordMatrix gamma_matrix() const;  // Gamma x I_F
  void validate() const;
};

// Normal-ordered operator polynomial sum_{(p, q)} C_{pq} X^-p (d/dx)^q with
// exact matrix coefficients.
class OperatorPolynomial {
 public:
  explicit OperatorPolynomial(std::size_t dim) : dim_(dim) {}
  void add(int x_power, int d_order, const CliffordMatrix& c);
  OperatorPolynomial compose(const OperatorPolynomial& rhs) const;  // this * rhs
  OperatorPolynomial operator+(const OperatorPolynomial& rhs) const;
  // Terms with nonzero coefficients only.
  const std::map<std::pair<int, int>, CliffordMatrix>& terms() const { return terms_; }
  CliffordMatrix coefficient(int x_power, int d_order) const;
  bool operator==(const OperatorPolynomial& rhs) const;
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
  std::map<std::pair<int, int>, CliffordMatrix> terms_;
  void prune();
};

struct SymbolicSquareReport {
  OperatorPolynomial square{0};
  OperatorPolynomial expected{0};  // -d^2 + X^-2 S(S+1) + T^2
  bool identity_holds = false;
  // X^-2 coefficient is diagonal with entries sigma a (sigma a + 1), sigma the sign of S~.
  bool componentwise_s_s1 = false;
};

SymbolicSquareReport symbolic_square(const ModelEdgeDirac& model);

struct DiracSquareLevel {
  int n = 0;
  double discrepancy = 0.0;
};

struct DiracSquareReport {
  std::vector<DiracSquareLevel> levels;
  std::vector<double> observed_orders;
};

// Applies the centered-difference D_h twice to u(x) e_c for every component
// c of the 4F-dimensional fiber and compares with the three-point
// discretization of -d^2 + X^-2 S(S+1) + T^2; max over the interior 80%.
DiracSquareReport dirac_square_structure(const ModelEdgeDirac& model, const std::function<double(double)>& u,
                                         const std::vector<int>& sizes, double x_min, double x_max);

}  // namespace edgespec::gb
