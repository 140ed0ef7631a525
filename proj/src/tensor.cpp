#include "kinship/tensor.hpp"

#include <functional>
#include <numeric>
#include <string>

#include "kinship/errors.hpp"

namespace kinship {

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_mode(const std::vector<std::size_t>& dims, std::size_t mode) {
  if (mode >= dims.size()) {
    throw UsageError("tensor mode " + std::to_string(mode) + " out of range for order " +
                     std::to_string(dims.size()));
  }
}

// Walks the tensor once; for every offset reports (row, col) of the mode-k
// unfolding. Iterating the odometer avoids a div/mod per element.
template <typename F>
void for_each_unfolded(const std::vector<std::size_t>& dims, std::size_t mode, F&& f) {
  const std::size_t n = dims.size();
  std::vector<std::size_t> col_stride(n, 0);
  std::size_t s = 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == mode) continue;
    col_stride[j] = s;
    s *= dims[j];
  }
  const std::size_t total = product(dims);
  std::vector<std::size_t> idx(n, 0);
  std::size_t col = 0;
  for (std::size_t off = 0; off < total; ++off) {
    f(off, idx[mode], col);
    for (std::size_t j = 0; j < n; ++j) {
      if (++idx[j] < dims[j]) {
        if (j != mode) col += col_stride[j];
        break;
      }
      if (j != mode) col -= col_stride[j] * (dims[j] - 1);
      idx[j] = 0;
    }
  }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> dims, double fill)
    : dims_(std::move(dims)), data_(product(dims_), fill) {}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (data_.size() != product(dims_)) {
    throw UsageError("Tensor: data size " + std::to_string(data_.size()) +
                     " does not match the dimensions");
  }
}

std::size_t Tensor::offset(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) {
    throw UsageError("Tensor: index order mismatch");
  }
  std::size_t off = 0;
  for (std::size_t j = dims_.size(); j-- > 0;) {
    off = off * dims_[j] + index[j];
  }
  return off;
}

std::vector<std::size_t> Tensor::index_of(std::size_t offset) const {
  std::vector<std::size_t> idx(dims_.size());
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    idx[j] = offset % dims_[j];
    offset /= dims_[j];
  }
  return idx;
}

Eigen::MatrixXd unfold(const Tensor& t, std::size_t mode) {
  check_mode(t.dims(), mode);
  const auto rows = static_cast<Eigen::Index>(t.dim(mode));
  const auto cols = static_cast<Eigen::Index>(t.size() / t.dim(mode));
  Eigen::MatrixXd m(rows, cols);
  const auto data = t.data();
  for_each_unfolded(t.dims(), mode, [&](std::size_t off, std::size_t r, std::size_t c) {
    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[off];
  });
  return m;
}

Tensor refold(const Eigen::MatrixXd& m, std::size_t mode, const std::vector<std::size_t>& dims) {
  check_mode(dims, mode);
  const std::size_t total = product(dims);
  if (static_cast<std::size_t>(m.rows()) != dims[mode] ||
      static_cast<std::size_t>(m.size()) != total) {
    throw UsageError("refold: matrix shape does not match the target dimensions");
  }
  Tensor t(dims);
  auto data = t.data();
  for_each_unfolded(dims, mode, [&](std::size_t off, std::size_t r, std::size_t c) {
    data[off] = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  });
  return t;
}

Tensor mode_product(const Tensor& t, const Eigen::MatrixXd& a, std::size_t mode) {
  check_mode(t.dims(), mode);
  if (static_cast<std::size_t>(a.cols()) != t.dim(mode)) {
    throw UsageError("mode_product: matrix has " + std::to_string(a.cols()) +
                     " columns but mode " + std::to_string(mode) + " has dim " +
                     std::to_string(t.dim(mode)));
  }
  std::vector<std::size_t> dims = t.dims();
  dims[mode] = static_cast<std::size_t>(a.rows());
  const Eigen::MatrixXd product_matrix = a * unfold(t, mode);
  return refold(product_matrix, mode, dims);
}

Tensor subtract(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims()) {
    throw UsageError("tensor subtract: shape mismatch");
  }
  Tensor out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] -= bd[i];
  }
  return out;
}

}  // namespace kinship
