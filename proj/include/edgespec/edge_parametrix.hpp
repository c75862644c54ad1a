#pragma once

// Fourier-multiplier right inverses on the flat model edge R+ x T_y with a
// finite fiber. y lives on a torus of period 2 pi sampled at Ny points.
//
// First order, fiber eigenvalue s, mu = |s|: on the mode e^{i xi y}
//   L(xi) = J (d/dx + diag(mu, -mu)/x) + xi diag(1, -1),  J = [[0, -1], [1, 0]],
// i.e. D = J (d/dx + M/x) - i diag(1, -1) d/dy in real space.
// Second order, nu = |s| + 1/2: L2(xi) = -d^2/dx^2 + (nu^2 - 1/4)/x^2 + xi^2.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "edgespec/halfline.hpp"

namespace edgespec::parametrix {

enum class Order { first, second };

inline int components(Order o) { return o == Order::first ? 2 : 1; }
inline int order_power(Order o) { return o == Order::first ? 1 : 2; }

inline constexpr int kMaxYModes = 64;

struct EdgeModel {
  halfline::HalfLineGrid grid;
  int ny = 32;                  // power of two, at most kMaxYModes
  std::vector<double> fiber_s;  // spectrum of S(y0)
  double gap = 1.0;

  // Throws WittViolation if the fiber fails the Witt condition and
  // ConfigError for a bad y grid.
  void validate() const;
  std::size_t fibers() const { return fiber_s.size(); }
  // Frequency of FFT bin k: k for k < ny/2, k - ny otherwise.
  double xi(int k) const;
};

struct EdgeFunction {
  std::size_t nx = 0;
  int ny = 0;
  std::size_t fibers = 0;
  int comps = 1;
  double y_period = 6.283185307179586;
  std::vector<std::complex<double>> samples;  // ((ix * ny + iy) * fibers + f) * comps + c

  static EdgeFunction zeros(const EdgeModel& m, Order o);
  std::size_t index(std::size_t ix, int iy, std::size_t f, int c) const {
    return ((ix * static_cast<std::size_t>(ny) + static_cast<std::size_t>(iy)) * fibers + f) *
               static_cast<std::size_t>(comps) +
           static_cast<std::size_t>(c);
  }
  std::complex<double>& at(std::size_t ix, int iy, std::size_t f, int c) { return samples[index(ix, iy, f, c)]; }
  const std::complex<double>& at(std::size_t ix, int iy, std::size_t f, int c) const {
    return samples[index(ix, iy, f, c)];
  }
  // True when every sample at x > 1 is zero.
  bool support_flag(const halfline::HalfLineGrid& grid) const;
};

// y-Fourier coefficients: hat(ix, k, f, c) = (1/ny) sum_iy e^{-i k y} u(ix, iy, f, c).
EdgeFunction fourier_y(const EdgeFunction& u);
EdgeFunction inverse_fourier_y(const EdgeFunction& uh);

// L^2(dx dy) norm with the grid quadrature weights.
double l2_norm(const EdgeFunction& u, const halfline::HalfLineGrid& grid);

// Discrete D_h (first) or D_h^2 (second) applied mode by mode.
EdgeFunction apply_operator(const EdgeModel& m, const EdgeFunction& u, Order o);

// Q u: per-mode sparse LU solves of the discrete model systems.
EdgeFunction parametrix_apply(const EdgeModel& m, const EdgeFunction& u, Order o);

// Relative residual ||D_h (Q u) - u|| / ||u||.
double right_inverse_residual(const EdgeModel& m, const EdgeFunction& u, Order o);

struct ModeDecay {
  double xi = 0.0;
  double ratio = 0.0;     // ||L^-1 u_k|| / ||u_k||
  double envelope = 0.0;  // (1 + |xi|)^-order
};

struct ParametrixReport {
  double residual_rel = 0.0;
  double w11_bound = 0.0;      // ||X^-order Q u|| / ||u||
  double y_deriv_bound = 0.0;  // ||X^-order (X d/dy)^order Q u|| / ||u||
  std::vector<ModeDecay> per_mode_decay;
  double fitted_c = 0.0;       // max ratio / envelope
};

// Throws PreconditionError unless u vanishes for x > 1.
ParametrixReport mapping_bounds(const EdgeModel& m, const EdgeFunction& u, Order o);

// ||L(xi) v||^2 / (xi^2 ||v||^2) in the midpoint metric for one fiber value.
double energy_ratio(const halfline::HalfLineGrid& grid, double s, double xi, const Eigen::VectorXd& v);

// Smooth random input supported in [x_lo, 1]: a few Gaussian bumps in ln x
// times random trigonometric polynomials in y, per fiber and component.
EdgeFunction random_compact_input(const EdgeModel& m, Order o, std::uint64_t seed, double x_lo = 0.05);

}  // namespace edgespec::parametrix
