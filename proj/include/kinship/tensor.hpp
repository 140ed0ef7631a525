#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace kinship {

/// Dense real tensor of order N with the first index varying fastest:
/// offset(i_0, ..., i_{N-1}) = i_0 + I_0 * (i_1 + I_1 * (i_2 + ...)).
/// Modes are 0-based throughout this library.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, double fill = 0.0);
  Tensor(std::vector<std::size_t> dims, std::vector<double> data);

  std::size_t order() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double& operator[](std::size_t offset) { return data_[offset]; }
  double operator[](std::size_t offset) const { return data_[offset]; }

  double& at(std::span<const std::size_t> index) { return data_[offset(index)]; }
  double at(std::span<const std::size_t> index) const { return data_[offset(index)]; }

  std::size_t offset(std::span<const std::size_t> index) const;

  /// Multi-index of a flat offset.
  std::vector<std::size_t> index_of(std::size_t offset) const;

  bool operator==(const Tensor&) const = default;

private:
  std::vector<std::size_t> dims_;
  std::vector<double> data_;
};

/// Mode-k matricization, I_k x prod_{j != k} I_j. Column ordering follows the
/// remaining modes in increasing order with the lowest varying fastest:
///   col = sum_{j != k} i_j * prod_{l < j, l != k} I_l.
/// Throws UsageError for an invalid mode.
Eigen::MatrixXd unfold(const Tensor& t, std::size_t mode);

/// Inverse of unfold for a tensor of shape `dims`.
Tensor refold(const Eigen::MatrixXd& m, std::size_t mode, const std::vector<std::size_t>& dims);

/// t x_k A with A of shape J x I_k; the result has dim J on mode k.
Tensor mode_product(const Tensor& t, const Eigen::MatrixXd& a, std::size_t mode);

/// Element-wise a - b. Shapes must agree.
Tensor subtract(const Tensor& a, const Tensor& b);

}  // namespace kinship
