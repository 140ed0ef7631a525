#include "kinship/gray_image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "kinship/errors.hpp"

namespace kinship {

GrayImage::GrayImage(int height, int width, double fill)
    : height_(height), width_(width) {
  if (height <= 0 || width <= 0) {
    throw DataError("GrayImage: dimensions must be positive, got " +
                    std::to_string(height) + "x" + std::to_string(width));
  }
  pixels_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
}

double GrayImage::min_value() const {
  return pixels_.empty() ? 0.0 : *std::min_element(pixels_.begin(), pixels_.end());
}

double GrayImage::max_value() const {
  return pixels_.empty() ? 0.0 : *std::max_element(pixels_.begin(), pixels_.end());
}

namespace {

template <typename T>
GrayImage reduce_channels(const cv::Mat& mat, double scale) {
  const int channels = mat.channels();
  GrayImage out(mat.rows, mat.cols);
  for (int r = 0; r < mat.rows; ++r) {
    const T* row = mat.ptr<T>(r);
    for (int c = 0; c < mat.cols; ++c) {
      const T* px = row + static_cast<std::ptrdiff_t>(c) * channels;
      double v;
      if (channels == 1 || channels == 2) {
        v = static_cast<double>(px[0]);
      } else {
        // OpenCV decodes colour as BGR(A).
        v = kLumaR * static_cast<double>(px[2]) + kLumaG * static_cast<double>(px[1]) +
            kLumaB * static_cast<double>(px[0]);
      }
      out(r, c) = v * scale;
    }
  }
  return out;
}

}  // namespace

GrayImage load_grayscale(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw DataError("image not found: " + path.string());
  }
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty()) {
    throw DataError("cannot decode image: " + path.string());
  }
  switch (mat.depth()) {
    case CV_8U:
      return reduce_channels<std::uint8_t>(mat, 1.0);
    case CV_16U:
      return reduce_channels<std::uint16_t>(mat, 255.0 / 65535.0);
    case CV_32F:
      return reduce_channels<float>(mat, 1.0);
    default:
      throw DataError("unsupported pixel depth in " + path.string());
  }
}

void save_grayscale(const GrayImage& img, const std::filesystem::path& path) {
  cv::Mat mat(img.height(), img.width(), CV_8UC1);
  for (int r = 0; r < img.height(); ++r) {
    auto* row = mat.ptr<std::uint8_t>(r);
    for (int c = 0; c < img.width(); ++c) {
      row[c] = static_cast<std::uint8_t>(std::clamp(std::lround(img(r, c)), 0L, 255L));
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat);
  } catch (const cv::Exception& e) {
    throw DataError("cannot write image " + path.string() + ": " + e.what());
  }
  if (!ok) {
    throw DataError("cannot write image " + path.string());
  }
}

int reflect_index(int i, int n) {
  if (n == 1) {
    return 0;
  }
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) {
    m += period;
  }
  return m < n ? m : period - 1 - m;
}

}  // namespace kinship
