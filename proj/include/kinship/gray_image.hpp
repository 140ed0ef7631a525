#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace kinship {

/// Row-major H x W matrix of real intensities. Nominal range is [0, 255] for
/// images; the same type carries filter responses, which are unbounded.
class GrayImage {
public:
  GrayImage() = default;
  GrayImage(int height, int width, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  double& operator()(int row, int col) { return pixels_[index(row, col)]; }
  double operator()(int row, int col) const { return pixels_[index(row, col)]; }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  double min_value() const;
  double max_value() const;

  bool operator==(const GrayImage&) const = default;

private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> pixels_;
};

/// Filter output. Same layout as an image, different value range.
using ResponseMap = GrayImage;

// ITU-R BT.601 luma weights used to reduce colour inputs to one channel.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

/// Decodes any raster format OpenCV understands. Colour inputs are reduced
/// with the BT.601 weights; 16-bit inputs are rescaled to [0, 255].
/// Throws DataError if the file cannot be read or decoded.
GrayImage load_grayscale(const std::filesystem::path& path);

/// Writes an 8-bit single-channel image, rounding and clamping to [0, 255].
/// The format follows the file extension (png recommended).
void save_grayscale(const GrayImage& img, const std::filesystem::path& path);

/// Maps an out-of-range index onto [0, n) by half-sample symmetric reflection
/// (-1 -> 0, -2 -> 1, n -> n-1). Folds repeatedly for any offset.
int reflect_index(int i, int n);

}  // namespace kinship
