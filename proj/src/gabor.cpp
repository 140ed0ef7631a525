#include "kinship/gabor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kinship/errors.hpp"

namespace kinship {

double normalize_orientation(double theta) {
  constexpr double pi = std::numbers::pi;
  double t = std::fmod(theta, pi);
  if (t < 0.0) {
    t += pi;
  }
  return t >= pi ? 0.0 : t;
}

namespace {

// cos/sin(arg + psi). Quarter-turn phases use exact shift identities so that,
// e.g., the real part with psi = pi/2 is exactly zero at the origin.
double carrier(double arg, double psi, GaborPart part) {
  const double quarters = psi / (std::numbers::pi / 2.0);
  const double q = std::round(quarters);
  if (std::abs(quarters - q) < 1e-12) {
    const int turn = ((static_cast<int>(q) % 4) + 4) % 4 + (part == GaborPart::Imaginary ? 3 : 0);
    switch (turn % 4) {
      case 0: return std::cos(arg);
      case 1: return -std::sin(arg);
      case 2: return -std::cos(arg);
      default: return std::sin(arg);
    }
  }
  return part == GaborPart::Real ? std::cos(arg + psi) : std::sin(arg + psi);
}

}  // namespace

Eigen::MatrixXd make_gabor_kernel(const GaborParams& p, GaborPart part, int radius) {
  if (radius < 1) {
    throw UsageError("gabor kernel radius must be >= 1");
  }
  if (!(p.lambda > 0.0 && p.sigma > 0.0 && p.gamma > 0.0)) {
    throw UsageError("gabor parameters lambda, sigma and gamma must be > 0");
  }
  const int size = 2 * radius + 1;
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  const double two_sigma2 = 2.0 * p.sigma * p.sigma;
  const double g2 = p.gamma * p.gamma;
  Eigen::MatrixXd k(size, size);
  for (int row = 0; row < size; ++row) {
    const double y = row - radius;
    for (int col = 0; col < size; ++col) {
      const double x = col - radius;
      const double xr = x * c + y * s;
      const double yr = -x * s + y * c;
      const double envelope = std::exp(-(xr * xr + g2 * yr * yr) / two_sigma2);
      k(row, col) = envelope * carrier(2.0 * std::numbers::pi * xr / p.lambda, p.psi, part);
    }
  }
  return k;
}

GaborBank::GaborBank(std::vector<GaborFilter> filters,
                     std::vector<std::vector<std::size_t>> scale_groups,
                     double kernel_radius_factor)
    : filters_(std::move(filters)),
      scale_groups_(std::move(scale_groups)),
      kernel_radius_factor_(kernel_radius_factor) {
  std::vector<int> seen(filters_.size(), 0);
  for (const auto& group : scale_groups_) {
    if (group.empty()) {
      throw UsageError("gabor bank: empty scale group");
    }
    for (std::size_t i : group) {
      if (i >= filters_.size()) {
        throw UsageError("gabor bank: scale group index out of range");
      }
      ++seen[i];
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](int n) { return n != 1; })) {
    throw UsageError("gabor bank: scale groups must partition the filters");
  }
}

int GaborBank::radius(std::size_t i) const {
  return std::max(1, static_cast<int>(std::ceil(kernel_radius_factor_ * filters_[i].params.sigma)));
}

int GaborBank::max_radius() const {
  int r = 1;
  for (std::size_t i = 0; i < filters_.size(); ++i) {
    r = std::max(r, radius(i));
  }
  return r;
}

Eigen::MatrixXd GaborBank::kernel(std::size_t i) const {
  return make_gabor_kernel(filters_[i].params, filters_[i].part, radius(i));
}

std::vector<double> effective_wavelengths(const BankSpec& spec) {
  std::vector<double> lambdas = spec.wavelengths;
  if (spec.scales == 0 || lambdas.empty() || spec.phases_deg.empty()) {
    return lambdas;
  }
  const std::size_t phases = spec.phases_deg.size();
  const auto scales = static_cast<std::size_t>(spec.scales);
  if (spec.scales < 0 || scales % phases != 0) {
    throw UsageError("gabor bank: scales (" + std::to_string(spec.scales) +
                     ") must be a positive multiple of the phase count (" +
                     std::to_string(phases) + ")");
  }
  const std::size_t wanted = scales / phases;
  if (wanted < lambdas.size()) {
    lambdas.resize(wanted);
  }
  while (lambdas.size() < wanted) {
    lambdas.push_back(lambdas.back() * std::numbers::sqrt2);
  }
  return lambdas;
}

GaborBank build_bank(const BankSpec& spec) {
  if (spec.orientations_deg.empty() || spec.wavelengths.empty() || spec.phases_deg.empty()) {
    throw UsageError("gabor bank: orientation, wavelength and phase lists must be non-empty");
  }
  if (!(spec.gamma > 0.0) || !(spec.kernel_radius_factor > 0.0)) {
    throw UsageError("gabor bank: gamma and kernel radius factor must be > 0");
  }
  const std::vector<double> lambdas = effective_wavelengths(spec);
  for (double l : lambdas) {
    if (!(l > 0.0)) {
      throw UsageError("gabor bank: wavelengths must be > 0");
    }
  }
  constexpr double deg = std::numbers::pi / 180.0;
  const std::size_t n_phase = spec.phases_deg.size();

  std::vector<GaborFilter> filters;
  std::vector<std::vector<std::size_t>> groups(lambdas.size() * n_phase);
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    for (double theta : spec.orientations_deg) {
      for (std::size_t pi = 0; pi < n_phase; ++pi) {
        for (GaborPart part : {GaborPart::Real, GaborPart::Imaginary}) {
          GaborParams p;
          p.lambda = lambdas[li];
          p.sigma = lambdas[li];
          p.theta = normalize_orientation(theta * deg);
          p.psi = spec.phases_deg[pi] * deg;
          p.gamma = spec.gamma;
          groups[li * n_phase + pi].push_back(filters.size());
          filters.push_back({p, part});
        }
      }
    }
  }
  return GaborBank(std::move(filters), std::move(groups), spec.kernel_radius_factor);
}

}  // namespace kinship
