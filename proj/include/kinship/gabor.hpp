#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kinship {

struct GaborParams {
  double lambda = 16.0;  // wavelength of the carrier, px
  double theta = 0.0;    // orientation of the stripe normal, radians in [0, pi)
  double psi = 0.0;      // phase offset, radians
  double sigma = 16.0;   // Gaussian envelope std, px
  double gamma = 1.0;    // spatial aspect ratio
};

enum class GaborPart { Real, Imaginary };

struct GaborFilter {
  GaborParams params;
  GaborPart part = GaborPart::Real;
};

/// Kernel sampled on offsets x, y in [-radius, radius]; entry (row, col) holds
/// offset (y, x) = (row - radius, col - radius):
///   exp(-(x'^2 + gamma^2 y'^2) / (2 sigma^2)) * cos(2 pi x' / lambda + psi)
/// with sin for the imaginary part, x' = x cos(theta) + y sin(theta) and
/// y' = -x sin(theta) + y cos(theta).
Eigen::MatrixXd make_gabor_kernel(const GaborParams& p, GaborPart part, int radius);

struct BankSpec {
  std::vector<double> orientations_deg{45.0, 67.5, 90.0, 112.5};
  std::vector<double> wavelengths{16.0, 22.63};
  std::vector<double> phases_deg{0.0, 90.0};
  double gamma = 1.0;
  // Number of (wavelength, phase) groups. 0 keeps the wavelength list as
  // given; otherwise it is extended by factors of sqrt(2) until
  // #wavelengths * #phases == scales.
  int scales = 0;
  double kernel_radius_factor = 2.5;
};

/// Filters ordered wavelength-major, then orientation, then phase, then part.
/// Every filter has sigma = lambda. A scale group collects the filters sharing
/// one (wavelength, phase) across all orientations and both parts.
class GaborBank {
public:
  GaborBank(std::vector<GaborFilter> filters, std::vector<std::vector<std::size_t>> scale_groups,
            double kernel_radius_factor);

  const std::vector<GaborFilter>& filters() const { return filters_; }
  const std::vector<std::vector<std::size_t>>& scale_groups() const { return scale_groups_; }
  std::size_t n_scales() const { return scale_groups_.size(); }
  double kernel_radius_factor() const { return kernel_radius_factor_; }

  /// ceil(factor * sigma) for filter i.
  int radius(std::size_t i) const;
  int max_radius() const;
  Eigen::MatrixXd kernel(std::size_t i) const;

private:
  std::vector<GaborFilter> filters_;
  std::vector<std::vector<std::size_t>> scale_groups_;
  double kernel_radius_factor_;
};

/// Wavelength list after extension to `scales` groups (see BankSpec::scales).
std::vector<double> effective_wavelengths(const BankSpec& spec);

/// Throws UsageError on empty lists, non-positive wavelengths or a scale count
/// that is not a positive multiple of the phase count.
GaborBank build_bank(const BankSpec& spec);

/// Orientation folded into [0, pi).
double normalize_orientation(double theta);

}  // namespace kinship
