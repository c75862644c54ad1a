#pragma once

// Modified Bessel functions I_nu, K_nu of real order nu > 0 and argument x > 0.
//
// Values are carried in a shared exponential scale s = nu * eta(x / nu), with
// eta(z) = sqrt(1 + z^2) + ln(z / (1 + sqrt(1 + z^2))):
//
//     I_nu(x) = i * exp(+s),      K_nu(x) = k * exp(-s).
//
// The mantissas i, k stay O(1/sqrt(nu)) uniformly, so products such as
// K_nu(beta x) I_nu(beta y) can be formed without overflow by combining the
// exponents first.

#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace edgespec::special {

using Rational = boost::multiprecision::cpp_rational;

class BesselOrder {
 public:
  explicit BesselOrder(double nu);
  double value() const noexcept { return nu_; }

 private:
  double nu_;
};

enum class BesselMethod { series, uniform_asymptotic, recurrence };

std::string_view to_string(BesselMethod method);

struct BesselEval {
  bool log_scaled = false;
  // I_nu(x) or K_nu(x); times exp(-s) resp. exp(+s) when log_scaled.
  double value = 0.0;
  // Bound on the relative error of value.
  double err_bound = 0.0;
  BesselMethod method = BesselMethod::series;
};

// Polynomial sum_k coeffs[k] p^k with exact rational coefficients.
struct RationalPolynomial {
  std::vector<Rational> coeffs;

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  double operator()(double p) const;
  RationalPolynomial derivative() const;
  std::vector<double> to_double() const;
};

// Olver's polynomials U_0..U_{n-1} in the variable p = (1 + z^2)^{-1/2} in
// (0, 1), together with U_n which controls the truncation error.
struct OlverFrame {
  int n_terms = 0;
  std::vector<RationalPolynomial> u_polys;  // U_0 .. U_{n-1}
  std::vector<double> tv_bounds;            // V_(0,1)(U_j)
  RationalPolynomial remainder_poly;        // U_n
  double remainder_tv = 0.0;                // V_(0,1)(U_n)

  // Double copies of U_0..U_n and the roots of their derivatives in (0, 1).
  std::vector<std::vector<double>> coeffs;
  std::vector<std::vector<double>> critical_points;

  double value(int j, double p) const;
  // V_(a,b)(U_j) for 0 <= a <= b <= 1, j <= n_terms.
  double variation(int j, double a, double b) const;
};

inline constexpr int kMaxOlverTerms = 8;

double olver_eta(double x);

// Builds the frame from the rational recurrence. 1 <= n <= kMaxOlverTerms.
OlverFrame olver_u_polys(int n);

// Shared immutable frames, built once.
const OlverFrame& olver_frame(int n);

// Exact total variation of a polynomial over (a, b), using the real roots of
// its derivative located by bisection.
double total_variation(const RationalPolynomial& poly, double a, double b);

// Bounds on the error terms eta_{n,1}(mu, z), eta_{n,1}(mu, inf) and
// eta_{n,2}(mu, z) of the n-term uniform expansions of I_mu(mu z), K_mu(mu z).
struct OlverErrorBounds {
  double eta1 = 0.0;
  double eta1_inf = 0.0;
  double eta2 = 0.0;
};

OlverErrorBounds olver_error_bounds(int n_terms, double mu, double z);

// The n-term uniform expansion evaluated directly (no branch selection).
// err_bound is the relative error implied by the eta bounds.
BesselEval bessel_i_uniform(BesselOrder order, double x, int n_terms, bool scaled);
BesselEval bessel_k_uniform(BesselOrder order, double x, int n_terms, bool scaled);

// I_nu, K_nu and their order-(nu+1) neighbours in the common scale s.
struct ScaledBesselPair {
  double nu = 0.0;
  double x = 0.0;
  double log_scale = 0.0;  // s = nu * eta(x / nu)
  double i0 = 0.0;         // I_nu(x)     * exp(-s)
  double i1 = 0.0;         // I_{nu+1}(x) * exp(-s)
  double k0 = 0.0;         // K_nu(x)     * exp(+s)
  double k1 = 0.0;         // K_{nu+1}(x) * exp(+s)
  double err_bound = 0.0;  // relative, applies to each of the four mantissas
  BesselMethod method = BesselMethod::series;
};

ScaledBesselPair bessel_ik_scaled(BesselOrder order, double x);

// s = nu * eta(x / nu), evaluated as sqrt(nu^2 + x^2) + nu ln(x / (nu + sqrt(nu^2 + x^2))).
double bessel_log_scale(double nu, double x);

// bessel_log_scale(nu + 1, x) - bessel_log_scale(nu, x) without cancellation.
double bessel_log_scale_step(double nu, double x);

BesselEval bessel_i(BesselOrder order, double x, bool scaled);
BesselEval bessel_k(BesselOrder order, double x, bool scaled);

// ((x d/dx) I_nu(x), (x d/dx) K_nu(x)) from
//   (x d/dx) I_nu = x I_{nu+1} + nu I_nu   (equivalently x I_{nu-1} - nu I_nu),
//   (x d/dx) K_nu = nu K_nu - x K_{nu+1}.
std::pair<double, double> bessel_log_derivatives(BesselOrder order, double x);

}  // namespace edgespec::special
