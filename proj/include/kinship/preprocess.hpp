#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "kinship/gray_image.hpp"

namespace kinship {

struct Ellipse {
  double x0 = 0.0;  // centre column
  double y0 = 0.0;  // centre row
  double a = 1.0;   // semi-axis along x
  double b = 1.0;   // semi-axis along y

  /// Inscribed ellipse of a height x width image: centred, a = width/2, b = height/2.
  static Ellipse inscribed(int height, int width);
};

struct PreprocConfig {
  int target_size = 200;
  // Inclusive pixel bounds in the resized image.
  int crop_x_begin = 55;
  int crop_x_end = 180;
  int crop_y_begin = 43;
  int crop_y_end = 157;
  double retinex_sigma = 15.0;
  double mask_fill = 0.0;
  // Unset means Ellipse::inscribed on the cropped image.
  std::optional<Ellipse> ellipse;
  bool enable_retinex = false;
  bool enable_mask = false;

  int crop_height() const { return crop_y_end - crop_y_begin + 1; }
  int crop_width() const { return crop_x_end - crop_x_begin + 1; }

  /// Throws UsageError if the crop leaves the target square or sigma <= 0.
  void validate() const;
};

/// Bilinear resample with pixel-centre alignment:
/// src = (dst + 0.5) * (src_size / dst_size) - 0.5, clamped to the image.
GrayImage resize_bilinear(const GrayImage& img, int height, int width);

/// Resize to target_size^2, then keep the inclusive crop window
/// (115 x 126 with the defaults).
GrayImage resize_and_crop(const GrayImage& img, const PreprocConfig& cfg);

/// Separable, normalized Gaussian blur with symmetric reflection; the kernel
/// is truncated at ceil(4 sigma).
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Single-scale Retinex: r = log(S + 1) - log(G_sigma * S + 1), then min-max
/// rescaled to [0, 255]. A constant map rescales to all zeros.
GrayImage retinex_ssr(const GrayImage& img, double sigma);

/// Keeps pixels with (x-x0)^2/a^2 + (y-y0)^2/b^2 <= 1, sets the rest to `fill`.
GrayImage elliptical_mask(const GrayImage& img, const Ellipse& e, double fill);

/// Runs the enabled stages on an already-loaded image:
/// resize -> crop -> Retinex -> mask.
GrayImage preprocess_image(const GrayImage& raw, const PreprocConfig& cfg);

/// Loads `path` and runs preprocess_image. With `debug_dir` set, every
/// intermediate stage is written there as <stem>_<n>_<stage>.png.
GrayImage preprocess_pipeline(const std::filesystem::path& path, const PreprocConfig& cfg,
                              const std::optional<std::filesystem::path>& debug_dir = {});

}  // namespace kinship
