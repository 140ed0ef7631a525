#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "kinship/convolution.hpp"
#include "kinship/gabor.hpp"
#include "kinship/gray_image.hpp"
#include "kinship/tensor.hpp"

namespace kinship {

inline constexpr int kHistogramBins = 256;

struct QuantizedMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> levels;  // row-major

  std::uint8_t operator()(int row, int col) const {
    return levels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)];
  }
};

/// Per-map min-max scaling to [0, 255] followed by floor. A constant map
/// quantizes to all zeros. Throws NumericError on non-finite input.
QuantizedMap quantize_response(const ResponseMap& map);

/// M x N blocks of P2 rows by P1 columns. Block j = by * N + bx (row-major).
struct BlockGrid {
  int p1 = 1;  // block width, px (along X)
  int p2 = 1;  // block height, px (along Y)
  int m = 1;   // blocks along Y
  int n = 1;   // blocks along X

  int blocks() const { return m * n; }
  int padded_height() const { return m * p2; }
  int padded_width() const { return n * p1; }

  /// Smallest blocks covering a height x width map with the requested counts.
  static BlockGrid covering(int height, int width, int blocks_y, int blocks_x);
};

/// 256 x (M*N) count matrix; column j is the histogram of block j. Maps
/// smaller than the grid are edge-replicated up to its padded size first.
Eigen::MatrixXd block_histograms(const QuantizedMap& qmap, const BlockGrid& grid);

/// 256 x blocks x scales histogram tensor. Flatten order is bins fastest,
/// then blocks, then scales.
class FeatureTensor {
public:
  FeatureTensor() = default;
  FeatureTensor(std::size_t blocks, std::size_t scales);
  explicit FeatureTensor(Tensor t);

  std::size_t bins() const { return values_.dim(0); }
  std::size_t blocks() const { return values_.dim(1); }
  std::size_t scales() const { return values_.dim(2); }

  double& operator()(std::size_t bin, std::size_t block, std::size_t scale) {
    return values_[bin + bins() * (block + blocks() * scale)];
  }
  double operator()(std::size_t bin, std::size_t block, std::size_t scale) const {
    return values_[bin + bins() * (block + blocks() * scale)];
  }

  const Tensor& tensor() const { return values_; }

  bool operator==(const FeatureTensor&) const = default;

private:
  Tensor values_;
};

std::vector<double> flatten_features(const FeatureTensor& t);
FeatureTensor unflatten_features(const std::vector<double>& flat, std::size_t blocks,
                                 std::size_t scales);

/// Hist-Gabor extraction for a fixed image size. Kernel spectra are computed
/// once at construction.
class HistGaborExtractor {
public:
  HistGaborExtractor(const GaborBank& bank, int height, int width, const BlockGrid& grid);

  const BlockGrid& grid() const { return grid_; }
  std::size_t n_scales() const { return groups_.size(); }

  /// Per scale group: sum over the group's orientations of the complex
  /// magnitude sqrt(real^2 + imag^2) of each (real, imaginary) filter pair.
  /// A filter without a partner contributes its absolute response.
  std::vector<ResponseMap> scale_group_magnitudes(const GrayImage& img);

  FeatureTensor extract(const GrayImage& img);

private:
  struct ComplexFilter {
    SpectralCorrelator::Spectrum spectrum;
  };

  int height_;
  int width_;
  BlockGrid grid_;
  std::unique_ptr<SpectralCorrelator> correlator_;
  // groups_[s] lists the complex filters (one per orientation) of scale s.
  std::vector<std::vector<ComplexFilter>> groups_;
};

/// One-shot extraction; prefer HistGaborExtractor for batches.
FeatureTensor extract_feature_tensor(const GrayImage& img, const GaborBank& bank,
                                     const BlockGrid& grid);

// Binary layout of a feature set (all integers unsigned):
//   char[8] "HGFEAT01" | u32 endian tag 0x01020304 | u32 reserved
//   u64 bins | u64 blocks | u64 scales | u64 count
//   count * bins * blocks * scales float64 values in flatten order.
// Integers and floats use the writer's byte order, which the tag records.
void save_feature_set(const std::vector<FeatureTensor>& tensors,
                      const std::filesystem::path& path);
std::vector<FeatureTensor> load_feature_set(const std::filesystem::path& path);

/// Debug dump: a "bins blocks scales" header line, then one value per line.
void save_feature_text(const FeatureTensor& t, const std::filesystem::path& path);

}  // namespace kinship
