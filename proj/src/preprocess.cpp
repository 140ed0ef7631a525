#include "kinship/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "kinship/errors.hpp"

namespace kinship {

Ellipse Ellipse::inscribed(int height, int width) {
  return {(width - 1) / 2.0, (height - 1) / 2.0, width / 2.0, height / 2.0};
}

void PreprocConfig::validate() const {
  if (target_size <= 0) {
    throw UsageError("preprocess: target_size must be positive");
  }
  const auto inside = [&](int lo, int hi) { return 0 <= lo && lo <= hi && hi < target_size; };
  if (!inside(crop_x_begin, crop_x_end) || !inside(crop_y_begin, crop_y_end)) {
    throw UsageError("preprocess: crop window must lie inside the resized image");
  }
  if (!(retinex_sigma > 0.0)) {
    throw UsageError("preprocess: retinex sigma must be > 0");
  }
  if (ellipse && !(ellipse->a > 0.0 && ellipse->b > 0.0)) {
    throw UsageError("preprocess: ellipse axes must be > 0");
  }
}

GrayImage resize_bilinear(const GrayImage& img, int height, int width) {
  if (img.empty()) {
    throw DataError("resize: empty image");
  }
  if (img.height() == height && img.width() == width) {
    return img;
  }
  const double sy = static_cast<double>(img.height()) / height;
  const double sx = static_cast<double>(img.width()) / width;
  const int max_r = img.height() - 1;
  const int max_c = img.width() - 1;

  GrayImage out(height, width);
  for (int r = 0; r < height; ++r) {
    const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, static_cast<double>(max_r));
    const int r0 = static_cast<int>(fy);
    const int r1 = std::min(r0 + 1, max_r);
    const double wy = fy - r0;
    for (int c = 0; c < width; ++c) {
      const double fx = std::clamp((c + 0.5) * sx - 0.5, 0.0, static_cast<double>(max_c));
      const int c0 = static_cast<int>(fx);
      const int c1 = std::min(c0 + 1, max_c);
      const double wx = fx - c0;
      const double top = img(r0, c0) * (1.0 - wx) + img(r0, c1) * wx;
      const double bottom = img(r1, c0) * (1.0 - wx) + img(r1, c1) * wx;
      out(r, c) = top * (1.0 - wy) + bottom * wy;
    }
  }
  return out;
}

GrayImage resize_and_crop(const GrayImage& img, const PreprocConfig& cfg) {
  cfg.validate();
  const GrayImage resized = resize_bilinear(img, cfg.target_size, cfg.target_size);
  GrayImage out(cfg.crop_height(), cfg.crop_width());
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      out(r, c) = resized(r + cfg.crop_y_begin, c + cfg.crop_x_begin);
    }
  }
  return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) {
    v /= sum;
  }

  const int h = img.height();
  const int w = img.width();
  GrayImage tmp(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += k[static_cast<std::size_t>(i + radius)] * img(r, reflect_index(c + i, w));
      }
      tmp(r, c) = acc;
    }
  }
  GrayImage out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += k[static_cast<std::size_t>(i + radius)] * tmp(reflect_index(r + i, h), c);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

GrayImage retinex_ssr(const GrayImage& img, double sigma) {
  if (!(sigma > 0.0)) {
    throw UsageError("retinex: sigma must be > 0");
  }
  const GrayImage surround = gaussian_blur(img, sigma);
  GrayImage r(img.height(), img.width());
  auto src = img.pixels();
  auto blur = surround.pixels();
  auto out = r.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::log(src[i] + 1.0) - std::log(blur[i] + 1.0);
  }
  const double lo = r.min_value();
  const double hi = r.max_value();
  if (!(hi > lo)) {
    return GrayImage(img.height(), img.width(), 0.0);
  }
  const double scale = 255.0 / (hi - lo);
  for (double& v : out) {
    v = (v - lo) * scale;
  }
  return r;
}

GrayImage elliptical_mask(const GrayImage& img, const Ellipse& e, double fill) {
  if (!(e.a > 0.0 && e.b > 0.0)) {
    throw UsageError("elliptical mask: axes must be > 0");
  }
  GrayImage out = img;
  for (int y = 0; y < out.height(); ++y) {
    const double dy = (y - e.y0) / e.b;
    for (int x = 0; x < out.width(); ++x) {
      const double dx = (x - e.x0) / e.a;
      if (dx * dx + dy * dy > 1.0) {
        out(y, x) = fill;
      }
    }
  }
  return out;
}

namespace {

GrayImage run_stages(const GrayImage& raw, const PreprocConfig& cfg,
                     const std::function<void(const GrayImage&, const char*)>& emit) {
  GrayImage img = resize_and_crop(raw, cfg);
  emit(img, "crop");
  if (cfg.enable_retinex) {
    img = retinex_ssr(img, cfg.retinex_sigma);
    emit(img, "retinex");
  }
  if (cfg.enable_mask) {
    const Ellipse e = cfg.ellipse.value_or(Ellipse::inscribed(img.height(), img.width()));
    img = elliptical_mask(img, e, cfg.mask_fill);
    emit(img, "mask");
  }
  return img;
}

}  // namespace

GrayImage preprocess_image(const GrayImage& raw, const PreprocConfig& cfg) {
  return run_stages(raw, cfg, [](const GrayImage&, const char*) {});
}

GrayImage preprocess_pipeline(const std::filesystem::path& path, const PreprocConfig& cfg,
                              const std::optional<std::filesystem::path>& debug_dir) {
  cfg.validate();
  const GrayImage raw = load_grayscale(path);
  if (!debug_dir) {
    return preprocess_image(raw, cfg);
  }
  std::filesystem::create_directories(*debug_dir);
  const std::string stem = path.stem().string();
  int stage = 0;
  auto emit = [&](const GrayImage& img, const char* name) {
    ++stage;
    save_grayscale(img, *debug_dir / (stem + "_" + std::to_string(stage) + "_" + name + ".png"));
  };
  emit(raw, "input");
  return run_stages(raw, cfg, emit);
}

}  // namespace kinship
