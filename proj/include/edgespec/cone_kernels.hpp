#pragma once

// Green kernels of the model operator -d^2/dx^2 + (nu^2 - 1/4)/x^2 + beta^2 on
// (0, inf) with decaying behaviour at both ends.
//
//   free   (beta = 0):  k(x, y) = (1/(2 nu)) (min/max)^nu sqrt(x y)
//   bessel (beta > 0):  k(x, y) = sqrt(x y) I_nu(beta min) K_nu(beta max)
//
// A WeightedAction (w, d) stands for the operator with kernel
// (x d/dx)^d [x^w k(x, y)], derivatives taken in the first argument. For
// d = 2 the kink of k on the diagonal contributes a point mass: the operator
// equals the pointwise kernel plus the multiplication operator -x^(w+2).

#include <functional>
#include <span>
#include <utility>

namespace edgespec::kernels {

enum class KernelKind { free, bessel };

inline constexpr double kDefaultDeltaMin = 0.05;

class ConeKernel {
 public:
  // Throws WittViolation for nu < 3/2 + delta_min and ConfigError for a beta
  // that does not match the kind.
  ConeKernel(KernelKind kind, double nu, double beta, double delta_min = kDefaultDeltaMin);

  static ConeKernel free(double nu, double delta_min = kDefaultDeltaMin) {
    return ConeKernel(KernelKind::free, nu, 0.0, delta_min);
  }
  static ConeKernel bessel(double nu, double beta, double delta_min = kDefaultDeltaMin) {
    return ConeKernel(KernelKind::bessel, nu, beta, delta_min);
  }

  KernelKind kind() const noexcept { return kind_; }
  double nu() const noexcept { return nu_; }
  double beta() const noexcept { return beta_; }

 private:
  KernelKind kind_;
  double nu_;
  double beta_;
};

struct WeightedAction {
  int weight_power = 0;      // 0, -1 or -2
  int edge_derivatives = 0;  // 0, 1 or 2
};

void validate(const WeightedAction& a);

// Per-point data from which kernel values are assembled in O(1). For the
// Bessel kind, i[m] = I_{nu+m}(beta x) exp(-s) and k[m] = K_{nu+m}(beta x) exp(s)
// with s = nu eta(beta x / nu).
struct NodeFactors {
  double x = 0.0;
  double log_x = 0.0;
  double s = 0.0;
  double i[3] = {0.0, 0.0, 0.0};
  double k[3] = {0.0, 0.0, 0.0};
};

NodeFactors node_factors(const ConeKernel& k, double x);

// Pointwise weighted kernel from tabulated factors; on x == y the two
// one-sided values are averaged (they agree for d = 0).
double weighted_kernel(const ConeKernel& k, const WeightedAction& a, const NodeFactors& fx,
                       const NodeFactors& fy);

double kernel_eval(const ConeKernel& k, double x, double y);
double weighted_kernel_eval(const ConeKernel& k, const WeightedAction& a, double x, double y);

// Coefficient c(x) of the point-mass part c(x) * u(x); zero unless d = 2.
double diagonal_mass(const WeightedAction& a, double x);

struct SchurIntegrals {
  double row = 0.0;  // sup_x int |x^-2 k(x, y)| dy
  double col = 0.0;  // sup_y int |x^-2 k(x, y)| dx
};

// Closed forms for the free kernel: row = (nu^2 - 9/4)^-1, col = (nu^2 - 1/4)^-1.
// Throws WittViolation for nu <= 3/2.
SchurIntegrals free_schur_integrals(double nu);

// int_0^inf |weighted kernel(x, y)| dy at fixed x, and int_0^inf ... dx at
// fixed y, by Gauss-Legendre panels in ln y (32 nodes per decade) with the
// tails extended until a geometric tail estimate drops below 1e-13.
double schur_row_integral(const ConeKernel& k, const WeightedAction& a, double x);
double schur_col_integral(const ConeKernel& k, const WeightedAction& a, double y);

// Integral of f over [a, b] (0 < a < b) by the same log-variable panels.
double log_panel_integral(const std::function<double(double)>& f, double a, double b);

struct ProductBound {
  double lhs = 0.0;
  double rhs = 0.0;
};

// alpha = 0: lhs = K_nu(beta x) I_nu(beta y),       rhs = (y/x)^nu / nu
// alpha = 1: lhs = x K_{nu+1}(beta x) I_nu(beta y), rhs = (y/x)^nu
// Requires y <= x (PreconditionError otherwise).
ProductBound product_bound_check(double nu, int alpha, double beta, double x, double y);

struct DecayValue {
  double value = 0.0;  // |K u(x)|
  double deriv = 0.0;  // |(x d/dx) K u(x)|
};

// K u at x > 1 by quadrature over the samples of u on the nodes y with
// weights w; u must vanish at nodes y > 1 (PreconditionError otherwise).
DecayValue decay_estimate_check(const ConeKernel& k, std::span<const double> y, std::span<const double> w,
                                std::span<const double> u, double x);

}  // namespace edgespec::kernels
