#include "edgespec/edge_parametrix.hpp"

#include <cmath>
#include <mutex>
#include <random>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fftw3.h>

#include "edgespec/errors.hpp"
#include "edgespec/model_operators.hpp"

namespace edgespec::parametrix {

namespace {

using Sparse = Eigen::SparseMatrix<double>;
using cd = std::complex<double>;

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// sign = FFTW_FORWARD or FFTW_BACKWARD; forward output is divided by ny.
EdgeFunction transform_y(const EdgeFunction& u, int sign) {
  EdgeFunction out = u;
  const int ny = u.ny;
  std::vector<cd> in(ny), res(ny);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_1d(ny, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(res.data()),
                            sign, FFTW_ESTIMATE);
  }
  const double scale = sign == FFTW_FORWARD ? 1.0 / ny : 1.0;
  for (std::size_t ix = 0; ix < u.nx; ++ix)
    for (std::size_t f = 0; f < u.fibers; ++f)
      for (int c = 0; c < u.comps; ++c) {
        for (int iy = 0; iy < ny; ++iy) in[iy] = u.at(ix, iy, f, c);
        fftw_execute(plan);
        for (int iy = 0; iy < ny; ++iy) out.at(ix, iy, f, c) = res[iy] * scale;
      }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

Sparse mode_matrix(const EdgeModel& m, std::size_t f, double xi, Order o) {
  double s = m.fiber_s[f];
  if (o == Order::first) return model::block_operator(std::abs(s), xi, m.grid);
  return model::scalar_operator(std::abs(s) + 0.5, std::abs(xi), m.grid);
}

// Stacks the x-profile of (k, f) as [c0 nodes; c1 nodes].
Eigen::VectorXcd gather(const EdgeFunction& u, int k, std::size_t f) {
  const auto n = static_cast<Eigen::Index>(u.nx);
  Eigen::VectorXcd v(n * u.comps);
  for (int c = 0; c < u.comps; ++c)
    for (Eigen::Index i = 0; i < n; ++i) v(c * n + i) = u.at(static_cast<std::size_t>(i), k, f, c);
  return v;
}

void scatter(EdgeFunction& u, int k, std::size_t f, const Eigen::VectorXcd& v) {
  const auto n = static_cast<Eigen::Index>(u.nx);
  for (int c = 0; c < u.comps; ++c)
    for (Eigen::Index i = 0; i < n; ++i) u.at(static_cast<std::size_t>(i), k, f, c) = v(c * n + i);
}

void check_shape(const EdgeModel& m, const EdgeFunction& u, Order o) {
  if (u.nx != m.grid.size() || u.ny != m.ny || u.fibers != m.fibers() || u.comps != components(o) ||
      u.samples.size() != u.nx * static_cast<std::size_t>(u.ny) * u.fibers * static_cast<std::size_t>(u.comps))
    throw ConfigError("edge function shape does not match the model");
  for (const auto& z : u.samples)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InputError("edge function: nonfinite samples");
}

double mode_norm(const Eigen::VectorXcd& v, const halfline::HalfLineGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  double t = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) t += grid.weights[j % n] * std::norm(v(j));
  return std::sqrt(t);
}

}  // namespace

void EdgeModel::validate() const {
  if (ny < 2 || ny > kMaxYModes || (ny & (ny - 1)) != 0)
    throw ConfigError("EdgeModel: ny must be a power of two in [2, " + std::to_string(kMaxYModes) + "]");
  auto w = model::check_witt({fiber_s, gap});
  if (!w.passes) {
    std::ostringstream os;
    os << "EdgeModel: fiber spectrum fails the Witt condition (min |s| = " << w.min_abs << ")";
    throw WittViolation(os.str());
  }
  if (grid.size() < 3) throw ConfigError("EdgeModel: grid too small");
}

double EdgeModel::xi(int k) const { return k < ny / 2 ? k : k - ny; }

EdgeFunction EdgeFunction::zeros(const EdgeModel& m, Order o) {
  EdgeFunction u;
  u.nx = m.grid.size();
  u.ny = m.ny;
  u.fibers = m.fibers();
  u.comps = components(o);
  u.samples.assign(u.nx * static_cast<std::size_t>(u.ny) * u.fibers * static_cast<std::size_t>(u.comps), cd(0.0));
  return u;
}

bool EdgeFunction::support_flag(const halfline::HalfLineGrid& grid) const {
  for (std::size_t ix = 0; ix < nx; ++ix) {
    if (grid.nodes[ix] <= 1.0) continue;
    for (int iy = 0; iy < ny; ++iy)
      for (std::size_t f = 0; f < fibers; ++f)
        for (int c = 0; c < comps; ++c)
          if (at(ix, iy, f, c) != cd(0.0)) return false;
  }
  return true;
}

EdgeFunction fourier_y(const EdgeFunction& u) { return transform_y(u, FFTW_FORWARD); }
EdgeFunction inverse_fourier_y(const EdgeFunction& uh) { return transform_y(uh, FFTW_BACKWARD); }

double l2_norm(const EdgeFunction& u, const halfline::HalfLineGrid& grid) {
  const double dy = u.y_period / u.ny;
  double t = 0.0;
  for (std::size_t ix = 0; ix < u.nx; ++ix)
    for (int iy = 0; iy < u.ny; ++iy)
      for (std::size_t f = 0; f < u.fibers; ++f)
        for (int c = 0; c < u.comps; ++c) t += grid.weights[ix] * dy * std::norm(u.at(ix, iy, f, c));
  return std::sqrt(t);
}

EdgeFunction apply_operator(const EdgeModel& m, const EdgeFunction& u, Order o) {
  m.validate();
  check_shape(m, u, o);
  auto uh = fourier_y(u);
  auto out = uh;
  for (int k = 0; k < m.ny; ++k)
    for (std::size_t f = 0; f < m.fibers(); ++f) {
      Sparse a = mode_matrix(m, f, m.xi(k), o);
      Eigen::VectorXcd v = gather(uh, k, f);
      Eigen::VectorXcd r = a.cast<cd>() * v;
      scatter(out, k, f, r);
    }
  return inverse_fourier_y(out);
}

EdgeFunction parametrix_apply(const EdgeModel& m, const EdgeFunction& u, Order o) {
  m.validate();
  check_shape(m, u, o);
  auto uh = fourier_y(u);
  auto out = uh;
  for (int k = 0; k < m.ny; ++k)
    for (std::size_t f = 0; f < m.fibers(); ++f) {
      Eigen::VectorXcd rhs = gather(uh, k, f);
      if (rhs.cwiseAbs().maxCoeff() == 0.0) continue;
      Sparse a = mode_matrix(m, f, m.xi(k), o);
      a.makeCompressed();
      Eigen::SparseLU<Sparse> lu;
      lu.compute(a);
      if (lu.info() != Eigen::Success) {
        std::ostringstream os;
        os << "parametrix_apply: singular mode matrix at s = " << m.fiber_s[f] << ", xi = " << m.xi(k) << ": "
           << lu.lastErrorMessage();
        throw NumericalError(os.str());
      }
      Eigen::VectorXd re = lu.solve(rhs.real().eval());
      Eigen::VectorXd im = lu.solve(rhs.imag().eval());
      if (!re.allFinite() || !im.allFinite())
        throw NumericalError("parametrix_apply: nonfinite solution at xi = " + std::to_string(m.xi(k)));
      Eigen::VectorXcd sol(re.size());
      sol.real() = re;
      sol.imag() = im;
      scatter(out, k, f, sol);
    }
  return inverse_fourier_y(out);
}

double right_inverse_residual(const EdgeModel& m, const EdgeFunction& u, Order o) {
  double nu = l2_norm(u, m.grid);
  if (nu == 0.0) return 0.0;
  auto q = parametrix_apply(m, u, o);
  auto back = apply_operator(m, q, o);
  for (std::size_t i = 0; i < back.samples.size(); ++i) back.samples[i] -= u.samples[i];
  return l2_norm(back, m.grid) / nu;
}

ParametrixReport mapping_bounds(const EdgeModel& m, const EdgeFunction& u, Order o) {
  m.validate();
  check_shape(m, u, o);
  if (!u.support_flag(m.grid)) throw PreconditionError("mapping_bounds: input must vanish for x > 1");
  ParametrixReport rep;
  const double nu = l2_norm(u, m.grid);
  if (nu == 0.0) return rep;
  const int p = order_power(o);
  auto q = parametrix_apply(m, u, o);
  rep.residual_rel = [&] {
    auto back = apply_operator(m, q, o);
    for (std::size_t i = 0; i < back.samples.size(); ++i) back.samples[i] -= u.samples[i];
    return l2_norm(back, m.grid) / nu;
  }();

  auto qh = fourier_y(q);
  auto uh = fourier_y(u);
  EdgeFunction weighted = q, ydq = qh;
  for (std::size_t ix = 0; ix < q.nx; ++ix) {
    double xp = std::pow(m.grid.nodes[ix], -p);
    for (int iy = 0; iy < q.ny; ++iy)
      for (std::size_t f = 0; f < q.fibers; ++f)
        for (int c = 0; c < q.comps; ++c) {
          weighted.at(ix, iy, f, c) *= xp;
          // X^-p (X d/dy)^p = (d/dy)^p
          ydq.at(ix, iy, f, c) *= std::pow(cd(0.0, m.xi(iy)), p);
        }
  }
  rep.w11_bound = l2_norm(weighted, m.grid) / nu;
  rep.y_deriv_bound = l2_norm(inverse_fourier_y(ydq), m.grid) / nu;

  double umax = 0.0;
  std::vector<double> un(m.ny, 0.0), qn(m.ny, 0.0);
  for (int k = 0; k < m.ny; ++k)
    for (std::size_t f = 0; f < m.fibers(); ++f) {
      un[k] += std::pow(mode_norm(gather(uh, k, f), m.grid), 2);
      qn[k] += std::pow(mode_norm(gather(qh, k, f), m.grid), 2);
    }
  for (double v : un) umax = std::max(umax, v);
  for (int k = 0; k < m.ny; ++k) {
    if (!(un[k] > 1e-24 * umax)) continue;
    ModeDecay d;
    d.xi = m.xi(k);
    d.ratio = std::sqrt(qn[k] / un[k]);
    d.envelope = std::pow(1.0 + std::abs(d.xi), -p);
    rep.fitted_c = std::max(rep.fitted_c, d.ratio / d.envelope);
    rep.per_mode_decay.push_back(d);
  }
  std::sort(rep.per_mode_decay.begin(), rep.per_mode_decay.end(),
            [](const ModeDecay& a, const ModeDecay& b) { return a.xi < b.xi; });
  return rep;
}

double energy_ratio(const halfline::HalfLineGrid& grid, double s, double xi, const Eigen::VectorXd& v) {
  if (xi == 0.0) throw InputError("energy_ratio: xi must be nonzero");
  if (static_cast<std::size_t>(v.size()) != 2 * grid.size()) throw ConfigError("energy_ratio: size mismatch");
  Eigen::VectorXd mw = halfline::midpoint_weights(grid);
  Eigen::VectorXd w(2 * mw.size());
  w << mw, mw;
  Eigen::VectorXd lv = model::block_operator(std::abs(s), xi, grid) * v;
  double den = xi * xi * halfline::weighted_inner(v, v, w);
  if (den == 0.0) throw InputError("energy_ratio: v is zero");
  return halfline::weighted_inner(lv, lv, w) / den;
}

EdgeFunction random_compact_input(const EdgeModel& m, Order o, std::uint64_t seed, double x_lo) {
  m.validate();
  if (!(x_lo > 0.0 && x_lo < 1.0)) throw ConfigError("random_compact_input: need 0 < x_lo < 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto u = EdgeFunction::zeros(m, o);
  const double t0 = std::log(x_lo), t1 = 0.0;
  const int kmax = std::max(1, m.ny / 4);
  for (std::size_t f = 0; f < u.fibers; ++f)
    for (int c = 0; c < u.comps; ++c)
      for (int b = 0; b < 3; ++b) {
        double w = (0.15 + 0.2 * uni(rng)) * (t1 - t0);
        double centre = t0 + w + uni(rng) * (t1 - t0 - 2 * w);
        std::vector<cd> coef(2 * kmax + 1);
        for (auto& z : coef) z = cd(gauss(rng), gauss(rng));
        for (std::size_t ix = 0; ix < u.nx; ++ix) {
          double r = (std::log(m.grid.nodes[ix]) - centre) / w;
          if (std::abs(r) >= 1.0) continue;
          double bump = std::exp(1.0 - 1.0 / (1.0 - r * r));
          for (int iy = 0; iy < u.ny; ++iy) {
            double y = u.y_period * iy / u.ny;
            cd g = 0.0;
            for (int k = -kmax; k <= kmax; ++k) g += coef[k + kmax] * std::exp(cd(0.0, k * y));
            u.at(ix, iy, f, c) += bump * g;
          }
        }
      }
  return u;
}

}  // namespace edgespec::parametrix
