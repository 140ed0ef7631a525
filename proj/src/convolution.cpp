#include "kinship/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <string>

#include "kinship/errors.hpp"

namespace kinship {

namespace {

// The FFTW planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int kernel_radius(const Eigen::MatrixXd& kernel) {
  if (kernel.rows() != kernel.cols() || kernel.rows() % 2 == 0) {
    throw UsageError("convolve: kernel must be square with odd size, got " +
                     std::to_string(kernel.rows()) + "x" + std::to_string(kernel.cols()));
  }
  return static_cast<int>(kernel.rows() / 2);
}

void check_fits(const GrayImage& img, int radius) {
  if (img.empty()) {
    throw DataError("convolve: empty image");
  }
  if (radius > img.height() || radius > img.width()) {
    throw UsageError("convolve: kernel half-size " + std::to_string(radius) +
                     " exceeds image " + std::to_string(img.height()) + "x" +
                     std::to_string(img.width()));
  }
}

// Smallest n' >= n whose prime factors are all in {2, 3, 5, 7}.
int fft_friendly(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace

ResponseMap convolve_direct(const GrayImage& img, const Eigen::MatrixXd& kernel) {
  const int radius = kernel_radius(kernel);
  check_fits(img, radius);
  const int h = img.height();
  const int w = img.width();
  ResponseMap out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int rr = reflect_index(r + dy, h);
        for (int dx = -radius; dx <= radius; ++dx) {
          acc += kernel(dy + radius, dx + radius) * img(rr, reflect_index(c + dx, w));
        }
      }
      out(r, c) = acc;
    }
  }
  return out;
}

ResponseMap convolve_fft(const GrayImage& img, const Eigen::MatrixXd& kernel) {
  const int radius = kernel_radius(kernel);
  check_fits(img, radius);
  SpectralCorrelator corr(img.height(), img.width(), radius);
  const auto image = corr.image_spectrum(img);
  const auto k = corr.kernel_spectrum(kernel);
  ResponseMap out(img.height(), img.width());
  corr.correlate(image, k, out);
  return out;
}

ResponseMap convolve(const GrayImage& img, const Eigen::MatrixXd& kernel) {
  return kernel.rows() <= 11 ? convolve_direct(img, kernel) : convolve_fft(img, kernel);
}

SpectralCorrelator::SpectralCorrelator(int height, int width, int max_radius)
    : height_(height), width_(width), pad_(max_radius) {
  if (height <= 0 || width <= 0 || max_radius < 0) {
    throw UsageError("SpectralCorrelator: invalid geometry");
  }
  if (max_radius > height || max_radius > width) {
    throw UsageError("SpectralCorrelator: kernel half-size " + std::to_string(max_radius) +
                     " exceeds image " + std::to_string(height) + "x" + std::to_string(width));
  }
  rows_ = fft_friendly(height + 2 * pad_);
  cols_ = fft_friendly(width + 2 * pad_);
  const auto n = static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  buffer_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n));
  auto* data = reinterpret_cast<fftw_complex*>(buffer_);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_2d(rows_, cols_, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_2d(rows_, cols_, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
}

SpectralCorrelator::~SpectralCorrelator() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(buffer_);
}

void SpectralCorrelator::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }

void SpectralCorrelator::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

SpectralCorrelator::Spectrum SpectralCorrelator::image_spectrum(const GrayImage& img) {
  if (img.height() != height_ || img.width() != width_) {
    throw UsageError("SpectralCorrelator: image size does not match the plan");
  }
  const auto n = static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  std::fill(buffer_, buffer_ + n, std::complex<double>{});
  for (int r = 0; r < height_ + 2 * pad_; ++r) {
    const int sr = reflect_index(r - pad_, height_);
    for (int c = 0; c < width_ + 2 * pad_; ++c) {
      buffer_[static_cast<std::size_t>(r) * cols_ + c] = img(sr, reflect_index(c - pad_, width_));
    }
  }
  forward();
  return Spectrum(buffer_, buffer_ + n);
}

SpectralCorrelator::Spectrum SpectralCorrelator::kernel_spectrum(const Eigen::MatrixXd& real,
                                                                 const Eigen::MatrixXd* imag) {
  const int radius = kernel_radius(real);
  if (radius > pad_) {
    throw UsageError("SpectralCorrelator: kernel radius exceeds the planned padding");
  }
  if (imag && (imag->rows() != real.rows() || imag->cols() != real.cols())) {
    throw UsageError("SpectralCorrelator: real and imaginary kernels differ in size");
  }
  const auto n = static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  std::fill(buffer_, buffer_ + n, std::complex<double>{});
  // Correlation is convolution with the flipped kernel: tap (dy, dx) goes to
  // the wrapped position (-dy, -dx).
  for (int dy = -radius; dy <= radius; ++dy) {
    const int r = (rows_ - dy) % rows_;
    for (int dx = -radius; dx <= radius; ++dx) {
      const int c = (cols_ - dx) % cols_;
      const double re = real(dy + radius, dx + radius);
      const double im = imag ? (*imag)(dy + radius, dx + radius) : 0.0;
      buffer_[static_cast<std::size_t>(r) * cols_ + c] = {re, im};
    }
  }
  forward();
  return Spectrum(buffer_, buffer_ + n);
}

void SpectralCorrelator::correlate(const Spectrum& image, const Spectrum& kernel, ResponseMap& re,
                                   ResponseMap* im) {
  const auto n = static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  if (image.size() != n || kernel.size() != n) {
    throw UsageError("SpectralCorrelator: spectrum size does not match the plan");
  }
  for (std::size_t i = 0; i < n; ++i) {
    buffer_[i] = image[i] * kernel[i];
  }
  inverse();
  const double norm = 1.0 / static_cast<double>(n);
  if (re.height() != height_ || re.width() != width_) {
    re = ResponseMap(height_, width_);
  }
  if (im && (im->height() != height_ || im->width() != width_)) {
    *im = ResponseMap(height_, width_);
  }
  for (int r = 0; r < height_; ++r) {
    const std::complex<double>* row = buffer_ + static_cast<std::size_t>(r + pad_) * cols_ + pad_;
    for (int c = 0; c < width_; ++c) {
      re(r, c) = row[c].real() * norm;
      if (im) {
        (*im)(r, c) = row[c].imag() * norm;
      }
    }
  }
}

}  // namespace kinship
