#include "edgespec/cone_kernels.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "edgespec/errors.hpp"
#include "edgespec/special_functions.hpp"

namespace edgespec::kernels {

namespace {

using special::BesselOrder;

struct GaussRule {
  std::vector<double> t;  // nodes on [-1, 1]
  std::vector<double> w;
};

const GaussRule& gauss16() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 16>;
    GaussRule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      r.t.push_back(-a[i]);
      r.w.push_back(w[i]);
      r.t.push_back(a[i]);
      r.w.push_back(w[i]);
    }
    return r;
  }();
  return rule;
}

// Panels of half a decade in ln x.
double panels(const std::function<double(double)>& f, double a, double b) {
  const double la = std::log(a), lb = std::log(b);
  const double width = 0.5 * std::log(10.0);
  const int n = std::max(1, static_cast<int>(std::ceil((lb - la) / width - 1e-12)));
  const double h = (lb - la) / n;
  const auto& g = gauss16();
  double total = 0.0;
  for (int p = 0; p < n; ++p) {
    double c = la + (p + 0.5) * h;
    for (std::size_t i = 0; i < g.t.size(); ++i) {
      double x = std::exp(c + 0.5 * h * g.t[i]);
      total += 0.5 * h * g.w[i] * f(x) * x;
    }
  }
  return total;
}

// int over (0, pivot] (dir = -1) or [pivot, inf) (dir = +1) of a nonnegative f.
double tail(const std::function<double(double)>& f, double pivot, int dir) {
  double total = 0.0, prev = 0.0;
  for (int k = 0; k < 2000; ++k) {
    double e0 = std::pow(10.0, dir * k), e1 = std::pow(10.0, dir * (k + 1));
    double a = pivot * std::min(e0, e1), b = pivot * std::max(e0, e1);
    if (a == 0.0 || !std::isfinite(b)) break;
    double c = panels(f, a, b);
    total += c;
    if (c == 0.0 && k > 0) break;
    if (k >= 2 && prev > 0.0) {
      double r = c / prev;
      if (r < 1.0 && c * r / (1.0 - r) <= 1e-13 * total) break;
    }
    prev = c;
  }
  return total;
}

struct DerivTerms {
  std::array<double, 3> c{1.0, 0.0, 0.0};
};

// (x d/dx)^d applied to x^a z^0 F_nu(z), z = beta x, expanded as
// sum_m c_m x^a z^m F_{nu+m}(z); sign = +1 for F = I, -1 for F = K.
DerivTerms deriv_terms(double a, double nu, int d, double sign) {
  DerivTerms t;
  for (int step = 0; step < d; ++step) {
    std::array<double, 3> n{0.0, 0.0, 0.0};
    for (int m = 0; m < 3; ++m) {
      if (t.c[m] == 0.0) continue;
      n[m] += (a + 2.0 * m + nu) * t.c[m];
      if (m + 1 < 3) n[m + 1] += sign * t.c[m];
    }
    t.c = n;
  }
  return t;
}

double free_branch(double nu, const WeightedAction& a, double lx, double ly, bool below) {
  double w = a.weight_power;
  double coef = below ? (w - nu + 0.5) : (w + nu + 0.5);
  double power = std::pow(coef, a.edge_derivatives);
  double dist = below ? (lx - ly) : (ly - lx);
  return power / (2.0 * nu) * std::exp(w * lx - nu * dist + 0.5 * (lx + ly));
}

double bessel_branch(const ConeKernel& k, const WeightedAction& a, const NodeFactors& fx, const NodeFactors& fy,
                     bool below) {
  const double nu = k.nu();
  const double ax = a.weight_power + 0.5;
  const double z = k.beta() * fx.x;
  auto terms = deriv_terms(ax, nu, a.edge_derivatives, below ? -1.0 : 1.0);
  const double* f = below ? fx.k : fx.i;
  double sum = 0.0, zm = 1.0;
  for (int m = 0; m <= a.edge_derivatives; ++m) {
    sum += terms.c[m] * zm * f[m];
    zm *= z;
  }
  double other = below ? fy.i[0] : fy.k[0];
  double expo = ax * fx.log_x + 0.5 * fy.log_x + (below ? fy.s - fx.s : fx.s - fy.s);
  return sum * other * std::exp(expo);
}

double branch(const ConeKernel& k, const WeightedAction& a, const NodeFactors& fx, const NodeFactors& fy,
              bool below) {
  if (k.kind() == KernelKind::free) return free_branch(k.nu(), a, fx.log_x, fy.log_x, below);
  return bessel_branch(k, a, fx, fy, below);
}

}  // namespace

ConeKernel::ConeKernel(KernelKind kind, double nu, double beta, double delta_min)
    : kind_(kind), nu_(nu), beta_(beta) {
  if (!std::isfinite(nu) || !std::isfinite(beta)) throw ConfigError("ConeKernel: nu and beta must be finite");
  if (!(delta_min > 0.0)) throw ConfigError("ConeKernel: delta_min must be positive");
  if (nu < 1.5 + delta_min)
    throw WittViolation("ConeKernel: nu = " + std::to_string(nu) + " is below the floor 3/2 + " +
                        std::to_string(delta_min));
  if (beta < 0.0) throw ConfigError("ConeKernel: beta must be nonnegative");
  if (kind == KernelKind::free && beta != 0.0) throw ConfigError("ConeKernel: free kernel requires beta = 0");
  if (kind == KernelKind::bessel && !(beta > 0.0)) throw ConfigError("ConeKernel: bessel kernel requires beta > 0");
}

void validate(const WeightedAction& a) {
  if (a.weight_power > 0 || a.weight_power < -2) throw ConfigError("WeightedAction: weight_power must be 0, -1 or -2");
  if (a.edge_derivatives < 0 || a.edge_derivatives > 2)
    throw ConfigError("WeightedAction: edge_derivatives must be 0, 1 or 2");
}

NodeFactors node_factors(const ConeKernel& k, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("kernel: arguments must be positive and finite");
  NodeFactors f;
  f.x = x;
  f.log_x = std::log(x);
  if (k.kind() == KernelKind::free) return f;
  const double nu = k.nu();
  const double z = k.beta() * x;
  auto p0 = special::bessel_ik_scaled(BesselOrder(nu), z);
  auto p1 = special::bessel_ik_scaled(BesselOrder(nu + 1.0), z);
  const double ds = special::bessel_log_scale_step(nu, z);
  f.s = p0.log_scale;
  f.i[0] = p0.i0;
  f.i[1] = p0.i1;
  f.i[2] = p1.i1 * std::exp(ds);
  f.k[0] = p0.k0;
  f.k[1] = p0.k1;
  f.k[2] = p0.k0 + 2.0 * (nu + 1.0) / z * p0.k1;
  return f;
}

double weighted_kernel(const ConeKernel& k, const WeightedAction& a, const NodeFactors& fx, const NodeFactors& fy) {
  if (fy.x < fx.x) return branch(k, a, fx, fy, true);
  if (fy.x > fx.x) return branch(k, a, fx, fy, false);
  return 0.5 * (branch(k, a, fx, fy, true) + branch(k, a, fx, fy, false));
}

double kernel_eval(const ConeKernel& k, double x, double y) { return weighted_kernel_eval(k, {}, x, y); }

double weighted_kernel_eval(const ConeKernel& k, const WeightedAction& a, double x, double y) {
  validate(a);
  return weighted_kernel(k, a, node_factors(k, x), node_factors(k, y));
}

double diagonal_mass(const WeightedAction& a, double x) {
  if (a.edge_derivatives != 2) return 0.0;
  return -std::pow(x, a.weight_power + 2);
}

SchurIntegrals free_schur_integrals(double nu) {
  if (!(nu > 1.5))
    throw WittViolation("free_schur_integrals: nu = " + std::to_string(nu) + " <= 3/2, the integrals diverge");
  return {1.0 / (nu * nu - 2.25), 1.0 / (nu * nu - 0.25)};
}

double log_panel_integral(const std::function<double(double)>& f, double a, double b) {
  if (!(a > 0.0) || !(b > a)) throw ConfigError("log_panel_integral: need 0 < a < b");
  return panels(f, a, b);
}

double schur_row_integral(const ConeKernel& k, const WeightedAction& a, double x) {
  validate(a);
  auto fx = node_factors(k, x);
  std::function<double(double)> f = [&](double y) {
    return std::abs(weighted_kernel(k, a, fx, node_factors(k, y)));
  };
  return tail(f, x, -1) + tail(f, x, +1);
}

double schur_col_integral(const ConeKernel& k, const WeightedAction& a, double y) {
  validate(a);
  auto fy = node_factors(k, y);
  std::function<double(double)> f = [&](double x) {
    return std::abs(weighted_kernel(k, a, node_factors(k, x), fy));
  };
  return tail(f, y, -1) + tail(f, y, +1);
}

ProductBound product_bound_check(double nu, int alpha, double beta, double x, double y) {
  if (alpha != 0 && alpha != 1) throw ConfigError("product_bound_check: alpha must be 0 or 1");
  if (!(beta > 0.0) || !(x > 0.0) || !(y > 0.0)) throw DomainError("product_bound_check: beta, x, y must be positive");
  if (y > x) throw PreconditionError("product_bound_check: requires y <= x");
  auto px = special::bessel_ik_scaled(BesselOrder(nu), beta * x);
  auto py = special::bessel_ik_scaled(BesselOrder(nu), beta * y);
  double e = std::exp(py.log_scale - px.log_scale);
  double ratio = std::exp(nu * std::log(y / x));
  ProductBound r;
  if (alpha == 0) {
    r.lhs = px.k0 * py.i0 * e;
    r.rhs = ratio / nu;
  } else {
    r.lhs = x * px.k1 * py.i0 * e;
    r.rhs = ratio;
  }
  return r;
}

DecayValue decay_estimate_check(const ConeKernel& k, std::span<const double> y, std::span<const double> w,
                                std::span<const double> u, double x) {
  if (y.size() != w.size() || y.size() != u.size()) throw ConfigError("decay_estimate_check: size mismatch");
  if (!(x > 1.0)) throw PreconditionError("decay_estimate_check: requires x > 1");
  auto fx = node_factors(k, x);
  const WeightedAction plain{0, 0}, deriv{0, 1};
  double v = 0.0, dv = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (u[j] == 0.0) continue;
    if (y[j] > 1.0) throw PreconditionError("decay_estimate_check: u must be supported in [0, 1]");
    auto fy = node_factors(k, y[j]);
    v += weighted_kernel(k, plain, fx, fy) * u[j] * w[j];
    dv += weighted_kernel(k, deriv, fx, fy) * u[j] * w[j];
  }
  return {std::abs(v), std::abs(dv)};
}

}  // namespace edgespec::kernels
