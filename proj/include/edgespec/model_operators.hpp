#pragma once

// Frozen-coefficient model operators on one fiber eigenspace.
//
// Scalar:      L2 = -d^2/dx^2 + (nu^2 - 1/4)/x^2 + beta^2,  nu = |s| + 1/2
// First order: L  = J (d/dx + diag(mu, -mu)/x) + diag(beta, -beta),
//              J = [[0, -1], [1, 0]], mu = |s|,
// so that L^2 = -d^2/dx^2 + diag(mu(mu+1), mu(mu-1))/x^2 + beta^2.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "edgespec/cone_kernels.hpp"
#include "edgespec/halfline.hpp"

namespace edgespec::model {

struct FiberSpectrum {
  std::vector<double> eigenvalues;
  double gap = 1.0;
};

struct WittReport {
  bool passes = false;
  double min_abs = 0.0;
  double implied_nu_floor = 0.0;  // min |s| + 1/2
  double delta = 0.0;             // implied_nu_floor - 3/2
};

// passes iff every |s| > gap. Throws InputError for an empty or nonfinite list.
WittReport check_witt(const FiberSpectrum& spec);

// (|s| + 1/2)^2 - 1/4 == s^2 + |s| in exact rational arithmetic, s = num/den.
bool a_identity_exact(long long num, long long den);

enum class BlockKind { scalar_L2, block_L };

struct ModelBlock {
  BlockKind kind = BlockKind::scalar_L2;
  double nu = 0.0;       // |s| + 1/2
  double xi_norm = 0.0;  // beta; signed frequency allowed for block_L

  static ModelBlock from_eigenvalue(double s, double xi, BlockKind kind);
  double mu() const noexcept { return nu - 0.5; }
};

// The Green kernel matching a block: free for xi = 0, Bessel otherwise.
kernels::ConeKernel green_kernel(const ModelBlock& block, double delta_min = kernels::kDefaultDeltaMin);

// f = K g by Nystrom quadrature with the Green kernel. Throws WittViolation
// below the floor 3/2 + delta_min.
Eigen::VectorXd solve_scalar(const ModelBlock& block, const Eigen::VectorXd& g, const halfline::HalfLineGrid& grid,
                             double delta_min = kernels::kDefaultDeltaMin);

// Sparse forms of the finite-difference discretizations (virtual Dirichlet
// end nodes, centered first differences). Unknowns of the block are ordered
// [f1; f2].
Eigen::SparseMatrix<double> scalar_operator(double nu, double beta, const halfline::HalfLineGrid& grid);
Eigen::SparseMatrix<double> block_operator(double mu, double xi, const halfline::HalfLineGrid& grid);

// L_h f for a block_L block; f stacked as [f1; f2].
Eigen::VectorXd block_apply(const ModelBlock& block, const Eigen::VectorXd& f, const halfline::HalfLineGrid& grid);

// Indices of the interior 80% of the nodes.
std::pair<std::size_t, std::size_t> interior_range(std::size_t n);

struct SquareLevel {
  int n = 0;
  double discrepancy = 0.0;  // max over interior nodes and both components
};

struct SquareIdentityReport {
  std::vector<SquareLevel> levels;
  std::vector<double> observed_orders;  // log2 of successive discrepancy ratios
};

// Compares L_h (L_h u) with the direct three-point discretization of
// -d^2 + S(S+1)/x^2 + beta^2, S = diag(|s|, -|s|), for u = (u1, u2) sampled on
// log grids of the listed sizes over [x_min, x_max].
SquareIdentityReport verify_square_identity(double s, double beta, const std::function<double(double)>& u1,
                                            const std::function<double(double)>& u2, const std::vector<int>& sizes,
                                            double x_min, double x_max);

struct SweepRow {
  double nu = 0.0;
  double beta = 0.0;
  double norm0 = 0.0;         // |X^-2 K|
  double norm1 = 0.0;         // |(X d/dx) X^-2 K|
  double norm2 = 0.0;         // |(X d/dx)^2 X^-2 K|
  double schur_ratio = 0.0;   // norm0 (nu^2 - 9/4)
  double nu2_ratio = 0.0;     // nu^2 norm0
  double nu1_ratio = 0.0;     // nu norm1
  double window_max = 0.0;    // right end of the grid actually used
};

struct SweepConfig {
  int grid_n = halfline::kDefaultGridN;
  double x_min = halfline::kDefaultXMin;
  double x_max = halfline::kDefaultXMax;
  double delta_min = kernels::kDefaultDeltaMin;
  // For beta > 0 the grid stops at min(x_max, z_cap / beta): a log grid with
  // N nodes cannot resolve the exp(-beta |x - y|) kernel width further out.
  double z_cap = 5.0;
  double tol = 1e-8;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  // max <= 1.1 median for each normalized column.
  bool schur_uniform = false;
  bool nu2_uniform = false;
  bool nu1_uniform = false;
  bool norm2_uniform = false;
};

double median(std::vector<double> v);

// Rows for every distinct nu_j = |s| + 1/2 of the spectrum and every beta;
// beta = 0 uses the free kernel. Throws WittViolation if the spectrum fails.
SweepTable uniform_bound_sweep(const FiberSpectrum& spec, const std::vector<double>& betas,
                               const SweepConfig& config = {});

struct WitnessSeries {
  std::string name;
  std::vector<double> norms;  // truncated W^{2,2} norms, one per level
  bool diverges = false;      // strictly increasing by at least 50% per level
};

// Truncated W^{2,2} norms (s = 2, delta = 2) of the homogeneous solutions on
// the windows [10^-(2+k), 10 * 2^k], k = 0, 1, 2. For beta = 0 these are
// x^{nu+1/2} and x^{-nu+1/2}, otherwise sqrt(x) I_nu(beta x), sqrt(x) K_nu(beta x).
std::vector<WitnessSeries> injectivity_witness(double nu, double beta, int grid_n = halfline::kDefaultGridN);

// Smooth bump exp(1 - 1/(1 - r^2)), r = (ln x - ln centre) / half_width,
// zero for |r| >= 1.
double log_bump(double x, double centre, double half_width);

// ||L2_h (K g) - g|| / ||g|| over the interior 80% of a log_trapezoid grid
// with n nodes, for g = log_bump(x, 1, 1.5) and the Green kernel of (nu, beta).
double round_trip_residual(double nu, double beta, int n, double x_min = halfline::kDefaultXMin,
                           double x_max = halfline::kDefaultXMax, double delta_min = kernels::kDefaultDeltaMin);

// sup over 200 log-spaced x in [2, 100] of |K u(x)| x^(1+delta) nu / ||u||,
// u = log_bump(x, 0.1, ln 10) supported in [0.01, 1].
double decay_sup(double nu, double beta, double delta, int n = halfline::kDefaultGridN);

}  // namespace edgespec::model
