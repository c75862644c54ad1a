#include "edgespec/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "edgespec/errors.hpp"

namespace edgespec::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
constexpr int kMaxIter = 20000000;
constexpr double kRescale = 1e280;

// Taylor coefficients of 1/Gamma(z) = sum_{k>=1} c[k] z^k.
constexpr double kRecipGamma[] = {
    0.0,
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};
constexpr int kRecipGammaLen = sizeof(kRecipGamma) / sizeof(double);

// gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2,
// from 1/G(1+z) = sum_k c[k+1] z^k.
void temme_gammas(double mu, double& gam1, double& gam2) {
  const double m2 = mu * mu;
  gam1 = 0.0;
  gam2 = 0.0;
  for (int m = (kRecipGammaLen - 1) / 2; m >= 0; --m) {
    if (2 * m + 2 < kRecipGammaLen) gam1 = gam1 * m2 + kRecipGamma[2 * m + 2];
    if (2 * m + 1 < kRecipGammaLen) gam2 = gam2 * m2 + kRecipGamma[2 * m + 1];
  }
  gam1 = -gam1;
}

struct KStart {
  double k_mu = 0.0;
  double k_mu1 = 0.0;
  double log_factor = 0.0;  // K = k * exp(log_factor)
  int iterations = 0;
};

// K_mu(x), K_{mu+1}(x) for |mu| <= 1/2 by Temme's series (x <= 2) or
// Steed's continued fraction (x > 2).
KStart k_start(double mu, double x) {
  KStart r;
  const double mu2 = mu * mu;
  if (x <= 2.0) {
    double x2 = 0.5 * x;
    double pimu = kPi * mu;
    double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2;
    temme_gammas(mu, gam1, gam2);
    double gampl = gam2 - mu * gam1;  // 1/G(1+mu)
    double gammi = gam2 + mu * gam1;  // 1/G(1-mu)
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i < kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * i - mu2);
      c *= d / i;
      p /= (i - mu);
      q /= (i + mu);
      double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i >= kMaxIter) throw NumericalError("bessel: Temme series did not converge");
    r.k_mu = sum;
    r.k_mu1 = sum1 * 2.0 / x;
    r.iterations = i;
    return r;
  }
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  double a1 = 0.25 - mu2;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i < kMaxIter; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i >= kMaxIter) throw NumericalError("bessel: Steed continued fraction did not converge");
  h = a1 * h;
  r.k_mu = std::sqrt(kPi / (2.0 * x)) / s;
  r.k_mu1 = r.k_mu * (mu + x + 0.5 - h) / x;
  r.log_factor = -x;
  r.iterations = i;
  return r;
}

// I_nu'(x) / I_nu(x) by the modified Lentz method.
double i_ratio(double nu, double x, int& iterations) {
  const double tiny = 1e-300;
  double h = nu / x;
  if (h < tiny) h = tiny;
  double b = 2.0 * nu / x;
  double d = 0.0, c = h;
  int i = 1;
  for (; i < kMaxIter; ++i) {
    b += 2.0 / x;
    d = 1.0 / (b + d);
    c = b + 1.0 / c;
    double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  if (i >= kMaxIter) throw NumericalError("bessel: continued fraction for I'/I did not converge");
  iterations = i;
  return h;
}

// sum_k (x^2/4)^k / (k! (nu+1)_k)
double i_series(double nu, double x, int& terms) {
  double q = 0.25 * x * x;
  double t = 1.0, s = 1.0;
  int k = 0;
  for (; k < kMaxIter; ++k) {
    t *= q / ((k + 1.0) * (nu + k + 1.0));
    s += t;
    if (t < kEps * s && (k + 1.0) * (nu + k + 1.0) > q) break;
  }
  terms = k + 1;
  return s;
}

void check_x(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(name) + ": x must be positive and finite");
}

// (I, K) mantissas at orders nu and nu+1 from the uniform expansion, with
// n chosen as the smallest count whose bound meets target; false if none does.
bool try_uniform(double nu, double x, ScaledBesselPair& out) {
  constexpr double target = 1e-13;
  const double nu1 = nu + 1.0;
  const double ds = bessel_log_scale_step(nu, x);
  for (int n = 4; n <= kMaxOlverTerms; ++n) {
    auto i0 = bessel_i_uniform(BesselOrder(nu), x, n, true);
    auto k0 = bessel_k_uniform(BesselOrder(nu), x, n, true);
    double err = std::max(i0.err_bound, k0.err_bound);
    if (err > target) continue;
    auto i1 = bessel_i_uniform(BesselOrder(nu1), x, n, true);
    auto k1 = bessel_k_uniform(BesselOrder(nu1), x, n, true);
    err = std::max({err, i1.err_bound, k1.err_bound});
    if (err > target) continue;
    out.i0 = i0.value;
    out.k0 = k0.value;
    out.i1 = i1.value * std::exp(ds);
    out.k1 = k1.value * std::exp(-ds);
    out.err_bound = err + 4.0 * kEps * (1.0 + std::abs(ds));
    out.method = BesselMethod::uniform_asymptotic;
    return true;
  }
  return false;
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("BesselOrder: nu must be positive and finite");
}

std::string_view to_string(BesselMethod method) {
  switch (method) {
    case BesselMethod::series: return "series";
    case BesselMethod::uniform_asymptotic: return "uniform_asymptotic";
    case BesselMethod::recurrence: return "recurrence";
  }
  return "unknown";
}

double bessel_log_scale(double nu, double x) {
  double r = std::hypot(nu, x);
  return r + nu * std::log(x / (nu + r));
}

double bessel_log_scale_step(double nu, double x) {
  const double r0 = std::hypot(nu, x);
  const double r1 = std::hypot(nu + 1.0, x);
  const double dr = (2.0 * nu + 1.0) / (r0 + r1);
  return dr + std::log(x / (nu + 1.0 + r1)) - nu * std::log1p((1.0 + dr) / (nu + r0));
}

ScaledBesselPair bessel_ik_scaled(BesselOrder order, double x) {
  check_x(x, "bessel_ik_scaled");
  const double nu = order.value();
  ScaledBesselPair out;
  out.nu = nu;
  out.x = x;
  out.log_scale = bessel_log_scale(nu, x);
  const double s = out.log_scale;

  if (nu >= 10.0 && try_uniform(nu, x, out)) return out;

  // K by forward recurrence from |mu| <= 1/2.
  const int nl = static_cast<int>(std::floor(nu + 0.5));
  const double mu = nu - nl;
  KStart ks = k_start(mu, x);
  double km = ks.k_mu, kp = ks.k_mu1, lf = ks.log_factor;
  for (int i = 1; i <= nl; ++i) {
    double knext = 2.0 * (mu + i) / x * kp + km;
    km = kp;
    kp = knext;
    if (std::abs(kp) > kRescale) {
      km /= kRescale;
      kp /= kRescale;
      lf += std::log(kRescale);
    }
  }
  double kexp = lf + s;
  out.k0 = km * std::exp(kexp);
  out.k1 = kp * std::exp(kexp);
  double err = kEps * (16.0 + 2.0 * nl + 2.0 * std::sqrt(static_cast<double>(ks.iterations)) +
                       2.0 * (std::abs(lf) + std::abs(s)));

  if (x <= std::max(10.0, 0.5 * nu)) {
    int t0 = 0, t1 = 0;
    double s0 = i_series(nu, x, t0);
    double s1 = i_series(nu + 1.0, x, t1);
    double lx = std::log(0.5 * x);
    double e0 = nu * lx - std::lgamma(nu + 1.0);
    double e1 = (nu + 1.0) * lx - std::lgamma(nu + 2.0);
    out.i0 = s0 * std::exp(e0 - s);
    out.i1 = s1 * std::exp(e1 - s);
    err += kEps * (4.0 * std::max(t0, t1) + 2.0 * (std::abs(nu * lx) + std::lgamma(nu + 2.0) + std::abs(s)));
    out.method = BesselMethod::series;
  } else {
    int it = 0;
    double h = i_ratio(nu, x, it);
    double kd = nu / x * out.k0 - out.k1;  // K_nu' in the same scale
    out.i0 = 1.0 / (x * (h * out.k0 - kd));
    out.i1 = out.i0 * (h - nu / x);
    err = 2.0 * err + kEps * (8.0 + 2.0 * std::sqrt(static_cast<double>(it)));
    out.method = BesselMethod::recurrence;
  }
  out.err_bound = 4.0 * err;
  return out;
}

namespace {

BesselEval finish(double mant, double lg_scale, double err, BesselMethod m, bool scaled, const char* name) {
  BesselEval r;
  r.log_scaled = scaled;
  r.err_bound = err;
  r.method = m;
  if (scaled || mant == 0.0) {
    r.value = mant;
    return r;
  }
  double lg = std::log(std::abs(mant)) + lg_scale;
  if (lg > std::log(std::numeric_limits<double>::max()))
    throw OverflowError(std::string(name) + " overflows double precision; call with scaled = true");
  r.value = std::copysign(std::exp(lg), mant);
  r.err_bound += 2.0 * kEps * std::abs(lg_scale);
  return r;
}

}  // namespace

BesselEval bessel_i(BesselOrder order, double x, bool scaled) {
  auto p = bessel_ik_scaled(order, x);
  return finish(p.i0, p.log_scale, p.err_bound, p.method, scaled, "bessel_i");
}

BesselEval bessel_k(BesselOrder order, double x, bool scaled) {
  auto p = bessel_ik_scaled(order, x);
  return finish(p.k0, -p.log_scale, p.err_bound, p.method, scaled, "bessel_k");
}

std::pair<double, double> bessel_log_derivatives(BesselOrder order, double x) {
  auto p = bessel_ik_scaled(order, x);
  const double nu = order.value();
  double di = x * p.i1 + nu * p.i0;
  double dk = nu * p.k0 - x * p.k1;
  auto di_eval = finish(di, p.log_scale, p.err_bound, p.method, false, "bessel_log_derivatives");
  auto dk_eval = finish(dk, -p.log_scale, p.err_bound, p.method, false, "bessel_log_derivatives");
  return {di_eval.value, dk_eval.value};
}

}  // namespace edgespec::special
