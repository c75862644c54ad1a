#pragma once

// Finite-dimensional interpolation scales H^s = D(Lambda^s) with Lambda >= I,
// tensor products of generators, and positivity of operator-matrix tensors.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace edgespec::scales {

inline constexpr std::size_t kMaxTensorDim = 4096;

class ScaleGenerator {
 public:
  // Throws InputError unless lambda is symmetric to 1e-12 (relative to its
  // largest entry) with smallest eigenvalue >= 1 - 1e-12.
  explicit ScaleGenerator(Eigen::MatrixXd lambda);

  const Eigen::MatrixXd& matrix() const noexcept { return lambda_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return evals_; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return evecs_; }
  Eigen::Index dim() const noexcept { return lambda_.rows(); }
  // Lambda^s by the spectral decomposition.
  Eigen::MatrixXd power(double s) const;

 private:
  Eigen::MatrixXd lambda_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
};

// Random symmetric generator with eigenvalues in [1, 1 + spread].
ScaleGenerator random_generator(Eigen::Index d, std::uint64_t seed, double spread = 4.0);

// |Lambda^s x|; ConfigError for s < 0.
double scale_norm(const ScaleGenerator& g, double s, const Eigen::VectorXd& x);

// Lambda1 x Lambda2 (Kronecker); ConfigError when d1 d2 > kMaxTensorDim.
ScaleGenerator tensor_generator(const ScaleGenerator& g1, const ScaleGenerator& g2);

struct TensorPowerReport {
  std::vector<double> s_values;
  std::vector<double> rel_errors;  // |(L1 x L2)^s - L1^s x L2^s| / |L1^s x L2^s| (Frobenius)
  double max_rel_error = 0.0;
  double lambda_min = 0.0;         // smallest eigenvalue of L1 x L2
  double lambda_min_product = 0.0;  // lambda_min(L1) lambda_min(L2)
};

TensorPowerReport tensor_power_identity(const ScaleGenerator& g1, const ScaleGenerator& g2,
                                        const std::vector<double>& s_values);

struct IntersectionReport {
  int trials = 0;
  int sandwich_violations = 0;  // 1/2 (|A x|^2 + |B x|^2) <= |C^s x|^2 <= 4^s (|A x|^2 + |B x|^2)
  int theta_violations = 0;     // |(L1^(theta s) x L2^((1-theta) s)) x| <= |C^s x|
  double worst_lower = 0.0;     // smallest |C^s x|^2 / (1/2 (...))
  double worst_upper = 0.0;     // largest |C^s x|^2 / (4^s (...))
  double worst_theta = 0.0;     // largest ratio in the theta inequality
  bool passes() const { return sandwich_violations == 0 && theta_violations == 0; }
};

// C = L1 x I + I x L2, A = L1^s x I, B = I x L2^s; C^s is computed from its
// own eigendecomposition. Slack 1e-10 relative.
IntersectionReport intersection_scale_check(const ScaleGenerator& g1, const ScaleGenerator& g2, double s,
                                            double theta, int trials, std::uint64_t seed);

// n x n array of d x d blocks.
struct BlockMatrix {
  std::vector<std::vector<Eigen::MatrixXd>> blocks;

  std::size_t n() const { return blocks.size(); }
  Eigen::Index d() const { return blocks.empty() ? 0 : blocks[0][0].rows(); }
  Eigen::MatrixXd assemble() const;
  void validate() const;  // ConfigError on inconsistent shapes
  static BlockMatrix from_matrix(const Eigen::MatrixXd& m, std::size_t n);
};

// Random PSD block matrix G G^T of rank <= rank (rank 0 means full).
BlockMatrix random_psd(std::size_t n, Eigen::Index d, std::uint64_t seed, Eigen::Index rank = 0);

// (a_ij x b_ij)_ij as an (n d1 d2) square matrix.
Eigen::MatrixXd block_tensor(const BlockMatrix& a, const BlockMatrix& b);
// sum_ij a_ij x b_ij.
Eigen::MatrixXd summed_tensor(const BlockMatrix& a, const BlockMatrix& b);

struct PositivityReport {
  double block_tensor_min = 0.0;  // lambda_min (a_ij x b_ij)
  double summed_min = 0.0;        // lambda_min sum a_ij x b_ij
  double monotone_min = 0.0;      // min over trials of lambda_min((c_ij x d_ij) - (a_ij x b_ij)), c >= a, d >= b
  int trials = 0;
  bool passes(double slack = 1e-10) const {
    return block_tensor_min >= -slack && summed_min >= -slack && monotone_min >= -slack;
  }
};

// InputError unless a and b are PSD (lambda_min >= -1e-10).
PositivityReport tensor_positivity_check(const BlockMatrix& a, const BlockMatrix& b, int trials, std::uint64_t seed);

struct EigenResidual {
  double eigenvalue = 0.0;  // of Lambda2^2
  double plain = 0.0;       // |f2'(0)| / |f2|_inf
  double robin = 0.0;       // |f2'(0) + a f2(0)| / |f2|_inf
};

struct SameScaleReport {
  double a = 0.0;
  double length = 0.0;
  int n = 0;
  std::vector<EigenResidual> modes;
};

// Staggered discretization of Lambda2 = [[0, d/dx + a], [-d/dx + a, 0]] on
// [0, L]: f1 on the nodes j h (f1 = 0 at both ends), f2 on the midpoints.
// Reports boundary residuals of the first `modes` eigenfunctions of Lambda2^2.
SameScaleReport same_scale_demo(double a, double length = 3.141592653589793, int n = 400, int modes = 3);

}  // namespace edgespec::scales
