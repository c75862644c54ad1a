#pragma once

// Truncated half-line grids, Nystrom and finite-difference assembly, weighted
// operator norms and discrete edge Sobolev norms.

#include <vector>

#include <Eigen/Dense>

#include "edgespec/cone_kernels.hpp"

namespace edgespec::halfline {

enum class GridScheme { log_trapezoid, log_gauss_panels };

struct HalfLineGrid {
  std::vector<double> nodes;
  std::vector<double> weights;  // quadrature for int dx
  GridScheme scheme = GridScheme::log_trapezoid;
  double x_min = 0.0;
  double x_max = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }
  Eigen::VectorXd x() const;
  Eigen::VectorXd w() const;
};

inline constexpr double kDefaultXMin = 1e-4;
inline constexpr double kDefaultXMax = 1e3;
inline constexpr int kDefaultGridN = 400;

// log_trapezoid: nodes uniform in ln x including both ends, trapezoid weights
// with order-8 Gregory end corrections. log_gauss_panels: n/8 panels uniform
// in ln x with 8 Gauss-Legendre nodes each (n % 8 == 0).
HalfLineGrid build_grid(int n, double x_min, double x_max, GridScheme scheme = GridScheme::log_trapezoid);

// Midpoint weights (x_{i+1} - x_{i-1}) / 2 with the virtual end nodes
// x_0^2 / x_1 and x_{N-1}^2 / x_{N-2}; the finite-difference operators below
// are symmetric (or skew) with respect to them.
Eigen::VectorXd midpoint_weights(const HalfLineGrid& grid);

struct DiscreteOperator {
  Eigen::MatrixXd matrix;
  HalfLineGrid grid;
  Eigen::VectorXd metric_weights;

  // W^-1 M^T W, the adjoint for <u, v> = sum_i w_i u_i v_i.
  Eigen::MatrixXd adjoint() const;
};

double weighted_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& w);
double weighted_norm(const Eigen::VectorXd& u, const Eigen::VectorXd& w);

// M_ij = kernel(x_i, x_j) w_j, plus the point mass of second-derivative
// actions on the diagonal.
DiscreteOperator nystrom_assemble(const kernels::ConeKernel& k, const kernels::WeightedAction& a,
                                  const HalfLineGrid& grid);

// Three-point nonuniform stencil for -d^2/dx^2 + (nu^2 - 1/4)/x^2 + beta^2
// with zero values at the virtual end nodes. Throws NumericalError when the
// grid is too coarse in ln x to resolve the 1/x^2 potential.
DiscreteOperator fd_assemble_model(double nu, double beta, const HalfLineGrid& grid);

// Just the -d^2/dx^2 part of fd_assemble_model.
Eigen::MatrixXd fd_second_difference(const HalfLineGrid& grid);

// Centered first difference with the same virtual Dirichlet nodes; skew with
// respect to midpoint_weights.
Eigen::MatrixXd fd_first_difference(const HalfLineGrid& grid);

// Largest singular value of op.matrix in the metric_weights inner product.
// Power iteration on M* M with Krylov acceleration (Lanczos with full
// reorthogonalization, started from the constant vector); stops when the
// top Ritz pair has residual below tol times its value. Throws NumericalError
// if that does not happen within min(N, 2000) steps.
double operator_norm(const DiscreteOperator& op, double tol = 1e-8);

struct SobolevSpec {
  int s = 0;  // 0, 1 or 2
  double delta = 0.0;
  std::vector<double> fiber_weights;
};

// (x d/dx) v by centered differences in ln x (one-sided at the ends).
Eigen::VectorXd edge_derivative(const HalfLineGrid& grid, const Eigen::VectorXd& v);

// u has one column per fiber index. With v = x^-delta u,
//   |u|^2 = sum_{a <= s} |(x d/dx)^a v|^2 + [s >= 1] sum_j nu_j^(2s) |v_j|^2,
// all L^2 norms taken with the grid quadrature weights.
double sobolev_norm(const Eigen::MatrixXd& u, const SobolevSpec& spec, const HalfLineGrid& grid);

}  // namespace edgespec::halfline
