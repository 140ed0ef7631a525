#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kinship/dataset.hpp"
#include "kinship/tensor.hpp"

namespace kinship {

/// Two views of the same classes: X holds parents, Z children. Each sample is
/// an order-N tensor; all samples share one shape. Pairs index X and Z.
struct TrainTensors {
  std::vector<Tensor> parents;
  std::vector<Tensor> children;
};

struct TxqdaConfig {
  std::vector<std::size_t> target_dims;  // I'_k per mode
  int iteration_max = 2;
  double eps_stop = 1e-3;
  // Ridge added to the intrapersonal scatter, relative to its mean
  // eigenvalue: reg * trace(S_I) / I_k.
  double reg = 1.0;
  std::size_t d = 190;

  /// Throws UsageError unless iteration_max >= 1, reg >= 0 and every target
  /// dim lies in [1, input dim].
  void validate(const std::vector<std::size_t>& input_dims) const;
};

struct ScatterPair {
  Eigen::MatrixXd intra;  // S_I over positive pairs
  Eigen::MatrixXd extra;  // S_E over negative pairs
};

/// Mode-k scatter of pair differences. With D_ij = unfold_k(x_i - z_j):
///   S_I = mean over positives of D D^T,  S_E = mean over negatives of D D^T.
/// Inputs are typically projected on every mode except k. Throws DataError
/// if either pair list is empty.
ScatterPair mode_scatter(std::span<const Tensor> parents, std::span<const Tensor> children,
                         const LabeledPairSet& pairs, std::size_t mode);

struct GenEigen {
  Eigen::MatrixXd vectors;  // size x dim, unit columns
  Eigen::VectorXd values;   // descending
};

/// Solves S_E w = lambda (S_I + reg I) w for the `dim` largest lambda. Columns
/// are scaled to unit length and signed so their largest-magnitude entry is
/// positive. Throws NumericError for non-finite input or when S_I + reg I is
/// not positive definite.
GenEigen solve_gen_eigen(const Eigen::MatrixXd& extra, const Eigen::MatrixXd& intra,
                         std::size_t dim, double reg);

/// max_j ||S_E w_j - lambda_j B w_j|| / (||S_E||_F + |lambda_j| ||B||_F).
double relative_residual(const Eigen::MatrixXd& extra, const Eigen::MatrixXd& b,
                         const GenEigen& eig);

struct ProjectionBasis {
  std::vector<Eigen::MatrixXd> W;        // W_k: I_k x I'_k
  std::vector<Eigen::VectorXd> Lambda;   // descending
  std::vector<std::size_t> feature_rank; // projected flat offsets, best first
  std::size_t d = 0;

  // Diagnostics from training; not serialized.
  int sweeps = 0;
  double max_residual = 0.0;

  std::vector<std::size_t> input_dims() const;
  std::vector<std::size_t> output_dims() const;

  /// Throws DataError if shapes, eigenvalues, rank permutation or d are
  /// inconsistent.
  void validate() const;
};

/// Alternating per-mode optimisation. Each W_k starts as the first I'_k
/// identity columns. A sweep visits k = 0..N-1: project all samples with the
/// current W_j^T on every j != k, build the mode-k scatters and replace W_k
/// by the leading generalized eigenvectors. Training stops after
/// iteration_max sweeps, or earlier once every ||W_k - W_k_prev||_F falls
/// below eps_stop * I_k * I'_k. Coordinates of the projected tensor are then
/// ranked by prod_k max(Lambda_k[i_k], 0), descending, stable in offset.
/// Throws NumericError naming the mode when S_E vanishes.
ProjectionBasis train_txqda(const TrainTensors& data, const LabeledPairSet& pairs,
                            const TxqdaConfig& cfg);

/// t x_1 W_1^T ... x_N W_N^T flattened, reordered by feature_rank and cut to
/// `d` entries (basis.d when d == 0).
Eigen::VectorXd project(const Tensor& t, const ProjectionBasis& basis, std::size_t d = 0);

// Binary layout (integers unsigned, writer byte order recorded by the tag):
//   char[8] "TXQDAB01" | u32 endian tag 0x01020304 | u32 version = 1
//   u64 N | per mode: u64 I_k, u64 I'_k, I_k*I'_k float64 (column-major W_k),
//   I'_k float64 Lambda_k | u64 rank length, rank entries u64 | u64 d
void save_basis(const ProjectionBasis& basis, const std::filesystem::path& path);
ProjectionBasis load_basis(const std::filesystem::path& path);

}  // namespace kinship
