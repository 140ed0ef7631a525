#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "kinship/gray_image.hpp"

namespace kinship {

// All routines compute the 2-D correlation
//   out(r, c) = sum_{dy, dx} k(dy + R, dx + R) * img(r + dy, c + dx)
// with symmetric (half-sample) reflection outside the image, so out has the
// input's shape and an impulse at p produces the kernel flipped about p.
//
// A kernel is accepted while its half-size fits inside the image along each
// axis (one reflection suffices); larger kernels throw UsageError.

/// Nested-loop spatial evaluation.
ResponseMap convolve_direct(const GrayImage& img, const Eigen::MatrixXd& kernel);

/// FFT evaluation through SpectralCorrelator.
ResponseMap convolve_fft(const GrayImage& img, const Eigen::MatrixXd& kernel);

/// Picks the direct path for small kernels, FFT otherwise.
ResponseMap convolve(const GrayImage& img, const Eigen::MatrixXd& kernel);

/// Correlation in the frequency domain for a fixed image geometry. Images are
/// reflect-padded by `max_radius` and transformed once; kernel spectra can be
/// cached and reused across images of the same size. Not thread-safe; use one
/// instance per thread.
class SpectralCorrelator {
public:
  using Spectrum = std::vector<std::complex<double>>;

  SpectralCorrelator(int height, int width, int max_radius);
  ~SpectralCorrelator();
  SpectralCorrelator(const SpectralCorrelator&) = delete;
  SpectralCorrelator& operator=(const SpectralCorrelator&) = delete;

  int height() const { return height_; }
  int width() const { return width_; }
  int max_radius() const { return pad_; }

  Spectrum image_spectrum(const GrayImage& img);

  /// Spectrum of the complex kernel real + i*imag (imag may be null).
  Spectrum kernel_spectrum(const Eigen::MatrixXd& real, const Eigen::MatrixXd* imag = nullptr);

  /// Response of the cached image to a cached kernel. The real part lands in
  /// `re`; the imaginary part in `im` when given.
  void correlate(const Spectrum& image, const Spectrum& kernel, ResponseMap& re,
                 ResponseMap* im = nullptr);

private:
  void forward();
  void inverse();

  int height_;
  int width_;
  int pad_;
  int rows_;
  int cols_;
  std::complex<double>* buffer_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace kinship
