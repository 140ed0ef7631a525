#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kinship/convolution.hpp"
#include "kinship/errors.hpp"
#include "kinship/gabor.hpp"
#include "test_util.hpp"

using namespace kinship;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double deg_between(double a, double b) {
  double d = std::abs(a - b) / kDeg;
  d = std::fmod(d, 180.0);
  return std::min(d, 180.0 - d);
}

GrayImage grating(int size, double lambda, double theta) {
  GrayImage img(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double u = x * std::cos(theta) + y * std::sin(theta);
      img(y, x) = 127.5 + 127.5 * std::cos(2.0 * std::numbers::pi * u / lambda);
    }
  return img;
}

double interior_mean_abs(const ResponseMap& r, int margin) {
  double s = 0.0;
  int n = 0;
  for (int y = margin; y < r.height() - margin; ++y)
    for (int x = margin; x < r.width() - margin; ++x) {
      s += std::abs(r(y, x));
      ++n;
    }
  return s / n;
}

}  // namespace

TEST(GaborKernel, OriginValues) {
  GaborParams p;
  p.lambda = p.sigma = 22.63;
  p.theta = 67.5 * kDeg;
  p.psi = 0.0;
  EXPECT_EQ(make_gabor_kernel(p, GaborPart::Real, 5)(5, 5), 1.0);
  EXPECT_EQ(make_gabor_kernel(p, GaborPart::Imaginary, 5)(5, 5), 0.0);
  p.psi = std::numbers::pi / 2;
  EXPECT_EQ(make_gabor_kernel(p, GaborPart::Real, 5)(5, 5), 0.0);
  EXPECT_EQ(make_gabor_kernel(p, GaborPart::Imaginary, 5)(5, 5), 1.0);
}

TEST(GaborKernel, MatchesFormulaOracle) {
  for (double theta : {0.0, 30.0, 45.0, 112.5, 170.0}) {
    for (double psi : {0.0, 37.0, 90.0, 180.0, 270.0}) {
      for (GaborPart part : {GaborPart::Real, GaborPart::Imaginary}) {
        GaborParams p{13.0, theta * kDeg, psi * kDeg, 9.5, 0.7};
        const int r = 12;
        const Eigen::MatrixXd k = make_gabor_kernel(p, part, r);
        ASSERT_EQ(k.rows(), 2 * r + 1);
        for (int y = -r; y <= r; ++y)
          for (int x = -r; x <= r; ++x) {
            const double ref = oracle::gabor(x, y, p.lambda, p.theta, p.psi, p.sigma, p.gamma,
                                             part == GaborPart::Imaginary);
            EXPECT_NEAR(k(y + r, x + r), ref, 1e-12);
          }
      }
    }
  }
}

TEST(GaborKernel, ParityAcrossDefaultBank) {
  const GaborBank bank = build_bank(BankSpec{});
  ASSERT_EQ(bank.filters().size(), 32u);
  for (std::size_t i = 0; i < bank.filters().size(); ++i) {
    const auto& f = bank.filters()[i];
    const Eigen::MatrixXd k = bank.kernel(i);
    const int r = bank.radius(i);
    // cos carrier is even, sin carrier odd; psi = 90 deg swaps them.
    const bool cos_like = (f.part == GaborPart::Real) == (std::abs(f.params.psi) < 1e-12);
    const double sign = cos_like ? 1.0 : -1.0;
    double worst = 0.0;
    for (int y = -r; y <= r; ++y)
      for (int x = -r; x <= r; ++x)
        worst = std::max(worst, std::abs(k(-y + r, -x + r) - sign * k(y + r, x + r)));
    EXPECT_LT(worst, 1e-12) << "filter " << i;
    if (!cos_like) {
      EXPECT_LT(std::abs(k.sum()), 1e-9) << "filter " << i;
    }
  }
}

TEST(GaborKernel, RejectsBadParameters) {
  EXPECT_THROW(make_gabor_kernel(GaborParams{}, GaborPart::Real, 0), UsageError);
  GaborParams p;
  p.sigma = 0.0;
  EXPECT_THROW(make_gabor_kernel(p, GaborPart::Real, 3), UsageError);
}

TEST(GaborBank, DefaultLayout) {
  const GaborBank bank = build_bank(BankSpec{});
  EXPECT_EQ(bank.n_scales(), 4u);
  // lambda-major, then theta, then psi, then part.
  const auto& f = bank.filters();
  EXPECT_DOUBLE_EQ(f[0].params.lambda, 16.0);
  EXPECT_DOUBLE_EQ(f[16].params.lambda, 22.63);
  EXPECT_NEAR(f[4].params.theta, 67.5 * kDeg, 1e-15);
  EXPECT_NEAR(f[2].params.psi, 90.0 * kDeg, 1e-15);
  EXPECT_EQ(f[1].part, GaborPart::Imaginary);
  for (const auto& filter : f) EXPECT_EQ(filter.params.sigma, filter.params.lambda);
  for (const auto& g : bank.scale_groups()) {
    ASSERT_EQ(g.size(), 8u);
    for (std::size_t i : g) {
      EXPECT_EQ(f[i].params.lambda, f[g[0]].params.lambda);
      EXPECT_EQ(f[i].params.psi, f[g[0]].params.psi);
    }
  }
  EXPECT_EQ(bank.radius(0), 40);
  EXPECT_EQ(bank.max_radius(), 57);
}

TEST(GaborBank, SingleCombination) {
  BankSpec s;
  s.orientations_deg = {90.0};
  s.wavelengths = {10.0};
  s.phases_deg = {0.0};
  const GaborBank bank = build_bank(s);
  EXPECT_EQ(bank.filters().size(), 2u);
  EXPECT_EQ(bank.n_scales(), 1u);
}

TEST(GaborBank, ScaleExtension) {
  BankSpec s;
  s.scales = 6;
  const auto l = effective_wavelengths(s);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_DOUBLE_EQ(l[2], 22.63 * std::numbers::sqrt2);
  EXPECT_EQ(build_bank(s).n_scales(), 6u);
  s.scales = 4;
  EXPECT_EQ(effective_wavelengths(s).size(), 2u);
  s.scales = 10;
  EXPECT_EQ(build_bank(s).n_scales(), 10u);
  s.scales = 5;
  EXPECT_THROW(build_bank(s), UsageError);
}

TEST(GaborBank, EmptyListsRejected) {
  BankSpec s;
  s.orientations_deg.clear();
  EXPECT_THROW(build_bank(s), UsageError);
  s = BankSpec{};
  s.phases_deg.clear();
  EXPECT_THROW(build_bank(s), UsageError);
}

TEST(GaborBank, GroupsMustPartition) {
  std::vector<GaborFilter> f(2);
  EXPECT_THROW(GaborBank(f, {{0}, {0, 1}}, 2.5), UsageError);
  EXPECT_THROW(GaborBank(f, {{0}}, 2.5), UsageError);
  EXPECT_THROW(GaborBank(f, {{0, 1}, {}}, 2.5), UsageError);
  EXPECT_NO_THROW(GaborBank(f, {{1}, {0}}, 2.5));
}

TEST(NormalizeOrientation, WrapsIntoHalfTurn) {
  EXPECT_DOUBLE_EQ(normalize_orientation(0.0), 0.0);
  EXPECT_NEAR(normalize_orientation(std::numbers::pi + 0.25), 0.25, 1e-15);
  EXPECT_NEAR(normalize_orientation(-0.25), std::numbers::pi - 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(normalize_orientation(std::numbers::pi), 0.0);
}

TEST(GaborResponse, MatchedGratingWinsOverBank) {
  const GaborBank bank = build_bank(BankSpec{});
  const GrayImage img = grating(176, 16.0, 90.0 * kDeg);
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < bank.filters().size(); ++i) {
    const double m = interior_mean_abs(convolve(img, bank.kernel(i)), 60);
    if (m > best) {
      best = m;
      arg = i;
    }
  }
  EXPECT_DOUBLE_EQ(bank.filters()[arg].params.lambda, 16.0);
  EXPECT_NEAR(bank.filters()[arg].params.theta, 90.0 * kDeg, 1e-12);
}

TEST(GaborResponse, GratingSelectivity) {
  const GaborBank bank = build_bank(BankSpec{});
  const auto& f = bank.filters();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const GrayImage img = grating(176, f[i].params.lambda, f[i].params.theta);
    const double own = interior_mean_abs(convolve(img, bank.kernel(i)), 60);
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (f[j].params.lambda != f[i].params.lambda || f[j].params.psi != f[i].params.psi ||
          f[j].part != f[i].part || deg_between(f[j].params.theta, f[i].params.theta) < 22.5) {
        continue;
      }
      EXPECT_GE(own, interior_mean_abs(convolve(img, bank.kernel(j)), 60)) << i << " vs " << j;
    }
  }
}
