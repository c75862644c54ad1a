// Uniform large-order expansions of I_nu(nu z) and K_nu(nu z).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "edgespec/errors.hpp"
#include "edgespec/special_functions.hpp"

namespace edgespec::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double horner(const std::vector<double>& c, double p) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * p + *it;
  return r;
}

std::vector<double> derivative_coeffs(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t j = 1; j < c.size(); ++j) d.push_back(static_cast<double>(j) * c[j]);
  return d;
}

// Roots of the polynomial d in the open interval (a, b), ascending.
std::vector<double> roots_in(const std::vector<double>& d, double a, double b) {
  std::vector<double> roots;
  if (d.empty()) return roots;
  const int samples = 4096;
  double x0 = a;
  double f0 = horner(d, x0);
  for (int k = 1; k <= samples; ++k) {
    double x1 = a + (b - a) * k / samples;
    double f1 = horner(d, x1);
    if (f1 == 0.0 && k < samples) {
      roots.push_back(x1);
    } else if (f0 * f1 < 0.0) {
      double lo = x0, hi = x1, flo = f0;
      while (hi - lo > 1e-14) {
        double mid = 0.5 * (lo + hi);
        double fm = horner(d, mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

double variation_from(const std::vector<double>& c, const std::vector<double>& crit, double a, double b) {
  if (b <= a) return 0.0;
  double total = 0.0;
  double prev = horner(c, a);
  for (double t : crit) {
    if (t <= a || t >= b) continue;
    double v = horner(c, t);
    total += std::abs(v - prev);
    prev = v;
  }
  total += std::abs(horner(c, b) - prev);
  return total;
}

RationalPolynomial next_u(const RationalPolynomial& u) {
  // U_{k+1} = 1/2 p^2 (1 - p^2) U_k' + 1/8 int_0^p (1 - 5 t^2) U_k(t) dt
  const std::size_t deg = u.coeffs.size() - 1;
  RationalPolynomial out;
  out.coeffs.assign(deg + 4, Rational(0));
  for (std::size_t j = 0; j <= deg; ++j) {
    const Rational& c = u.coeffs[j];
    if (c == 0) continue;
    Rational jr(static_cast<long long>(j));
    out.coeffs[j + 1] += jr * c / 2 + c / (8 * (jr + 1));
    out.coeffs[j + 3] += -jr * c / 2 - 5 * c / (8 * (jr + 3));
  }
  while (out.coeffs.size() > 1 && out.coeffs.back() == 0) out.coeffs.pop_back();
  return out;
}

double plain_p(double z) { return 1.0 / std::hypot(1.0, z); }

struct UniformSums {
  double sum_i = 0.0;
  double sum_k = 0.0;
};

UniformSums uniform_sums(const OlverFrame& f, double mu, double p) {
  UniformSums s;
  double w = 1.0;
  for (int j = 0; j < f.n_terms; ++j) {
    double u = f.value(j, p);
    s.sum_i += u * w;
    s.sum_k += (j % 2 == 0 ? u : -u) * w;
    w /= mu;
  }
  return s;
}

double check_unscaled(double mantissa, double log_scale, const char* name) {
  if (mantissa <= 0.0) return 0.0;
  double lg = std::log(mantissa) + log_scale;
  if (lg > std::log(std::numeric_limits<double>::max()))
    throw OverflowError(std::string(name) + " overflows double precision; call with scaled = true");
  return std::exp(lg);
}

}  // namespace

double RationalPolynomial::operator()(double p) const { return horner(to_double(), p); }

RationalPolynomial RationalPolynomial::derivative() const {
  RationalPolynomial d;
  for (std::size_t j = 1; j < coeffs.size(); ++j) d.coeffs.push_back(Rational(static_cast<long long>(j)) * coeffs[j]);
  if (d.coeffs.empty()) d.coeffs.push_back(Rational(0));
  return d;
}

std::vector<double> RationalPolynomial::to_double() const {
  std::vector<double> c;
  c.reserve(coeffs.size());
  for (const auto& r : coeffs) c.push_back(r.convert_to<double>());
  return c;
}

double OlverFrame::value(int j, double p) const { return horner(coeffs.at(j), p); }

double OlverFrame::variation(int j, double a, double b) const {
  return variation_from(coeffs.at(j), critical_points.at(j), a, b);
}

double total_variation(const RationalPolynomial& poly, double a, double b) {
  auto c = poly.to_double();
  return variation_from(c, roots_in(derivative_coeffs(c), a, b), a, b);
}

double olver_eta(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("olver_eta: x must be positive and finite");
  double r = std::hypot(1.0, x);
  return r + std::log(x / (1.0 + r));
}

OlverFrame olver_u_polys(int n) {
  if (n < 1 || n > kMaxOlverTerms)
    throw ConfigError("olver_u_polys: n must lie in [1, " + std::to_string(kMaxOlverTerms) + "]");
  std::vector<RationalPolynomial> all;
  all.push_back(RationalPolynomial{{Rational(1)}});
  for (int j = 0; j < n; ++j) all.push_back(next_u(all.back()));

  OlverFrame f;
  f.n_terms = n;
  for (int j = 0; j <= n; ++j) {
    auto c = all[j].to_double();
    f.critical_points.push_back(roots_in(derivative_coeffs(c), 0.0, 1.0));
    f.coeffs.push_back(std::move(c));
  }
  for (int j = 0; j < n; ++j) {
    f.u_polys.push_back(all[j]);
    f.tv_bounds.push_back(f.variation(j, 0.0, 1.0));
  }
  f.remainder_poly = all[n];
  f.remainder_tv = f.variation(n, 0.0, 1.0);
  return f;
}

const OlverFrame& olver_frame(int n) {
  static std::array<OlverFrame, kMaxOlverTerms + 1> frames;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int j = 1; j <= kMaxOlverTerms; ++j) frames[j] = olver_u_polys(j);
  });
  if (n < 1 || n > kMaxOlverTerms)
    throw ConfigError("olver_frame: n must lie in [1, " + std::to_string(kMaxOlverTerms) + "]");
  return frames[n];
}

OlverErrorBounds olver_error_bounds(int n_terms, double mu, double z) {
  if (!(mu > 0.0) || !(z > 0.0)) throw DomainError("olver_error_bounds: mu and z must be positive");
  const OlverFrame& f = olver_frame(n_terms);
  double p = plain_p(z);
  double mun = std::pow(mu, n_terms);
  auto bound = [&](double a, double b) {
    return 2.0 * std::exp(2.0 * f.variation(1, a, b) / mu) * f.variation(n_terms, a, b) / mun;
  };
  OlverErrorBounds e;
  e.eta1 = bound(p, 1.0);
  e.eta1_inf = bound(0.0, 1.0);
  e.eta2 = bound(0.0, p);
  return e;
}

namespace {

double rel_bound_i(const OlverErrorBounds& e, double sum) {
  double a = std::abs(sum);
  if (e.eta1_inf >= 1.0 || a == 0.0) return std::numeric_limits<double>::infinity();
  return (e.eta1 + a * e.eta1_inf) / (a * (1.0 - e.eta1_inf));
}

double rel_bound_k(const OlverErrorBounds& e, double sum) {
  double a = std::abs(sum);
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  return e.eta2 / a;
}

}  // namespace

BesselEval bessel_i_uniform(BesselOrder order, double x, int n_terms, bool scaled) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_i_uniform: x must be positive and finite");
  double mu = order.value();
  double z = x / mu;
  double p = plain_p(z);
  const OlverFrame& f = olver_frame(n_terms);
  auto sums = uniform_sums(f, mu, p);
  auto e = olver_error_bounds(n_terms, mu, z);
  double mant = std::sqrt(p / (2.0 * std::numbers::pi * mu)) * sums.sum_i;
  BesselEval r;
  r.log_scaled = scaled;
  r.method = BesselMethod::uniform_asymptotic;
  r.err_bound = rel_bound_i(e, sums.sum_i) + 8.0 * n_terms * kEps;
  double ls = bessel_log_scale(mu, x);
  r.value = scaled ? mant : check_unscaled(mant, ls, "bessel_i");
  if (!scaled) r.err_bound += 2.0 * kEps * std::abs(ls);
  return r;
}

BesselEval bessel_k_uniform(BesselOrder order, double x, int n_terms, bool scaled) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_k_uniform: x must be positive and finite");
  double mu = order.value();
  double z = x / mu;
  double p = plain_p(z);
  const OlverFrame& f = olver_frame(n_terms);
  auto sums = uniform_sums(f, mu, p);
  auto e = olver_error_bounds(n_terms, mu, z);
  double mant = std::sqrt(std::numbers::pi * p / (2.0 * mu)) * sums.sum_k;
  BesselEval r;
  r.log_scaled = scaled;
  r.method = BesselMethod::uniform_asymptotic;
  r.err_bound = rel_bound_k(e, sums.sum_k) + 8.0 * n_terms * kEps;
  double ls = bessel_log_scale(mu, x);
  r.value = scaled ? mant : check_unscaled(mant, -ls, "bessel_k");
  if (!scaled) r.err_bound += 2.0 * kEps * std::abs(ls);
  return r;
}

}  // namespace edgespec::special
