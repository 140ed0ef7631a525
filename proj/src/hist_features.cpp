#include "kinship/hist_features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

#include "binary_io.hpp"
#include "kinship/errors.hpp"

namespace kinship {

QuantizedMap quantize_response(const ResponseMap& map) {
  QuantizedMap q{map.height(), map.width(), std::vector<std::uint8_t>(map.size(), 0)};
  const auto px = map.pixels();
  if (std::any_of(px.begin(), px.end(), [](double v) { return !std::isfinite(v); })) {
    throw NumericError("quantize_response: non-finite response value");
  }
  const double lo = map.min_value();
  const double hi = map.max_value();
  if (!(hi > lo)) {
    return q;
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double v = std::floor((px[i] - lo) * 255.0 / range);
    q.levels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return q;
}

BlockGrid BlockGrid::covering(int height, int width, int blocks_y, int blocks_x) {
  if (blocks_y <= 0 || blocks_x <= 0) {
    throw UsageError("block grid: block counts must be positive");
  }
  if (blocks_y > height || blocks_x > width) {
    throw UsageError("block grid: more blocks than pixels");
  }
  BlockGrid g;
  g.m = blocks_y;
  g.n = blocks_x;
  g.p2 = (height + blocks_y - 1) / blocks_y;
  g.p1 = (width + blocks_x - 1) / blocks_x;
  return g;
}

Eigen::MatrixXd block_histograms(const QuantizedMap& qmap, const BlockGrid& grid) {
  if (grid.p1 <= 0 || grid.p2 <= 0 || grid.m <= 0 || grid.n <= 0) {
    throw UsageError("block_histograms: invalid grid");
  }
  if (qmap.height <= 0 || qmap.width <= 0) {
    throw DataError("block_histograms: empty map");
  }
  if (qmap.height > grid.padded_height() || qmap.width > grid.padded_width()) {
    throw UsageError("block_histograms: grid " + std::to_string(grid.padded_height()) + "x" +
                     std::to_string(grid.padded_width()) + " does not cover map " +
                     std::to_string(qmap.height) + "x" + std::to_string(qmap.width));
  }
  Eigen::MatrixXd hist = Eigen::MatrixXd::Zero(kHistogramBins, grid.blocks());
  for (int y = 0; y < grid.padded_height(); ++y) {
    const int sy = std::min(y, qmap.height - 1);
    const int by = y / grid.p2;
    for (int x = 0; x < grid.padded_width(); ++x) {
      const int sx = std::min(x, qmap.width - 1);
      hist(qmap(sy, sx), by * grid.n + x / grid.p1) += 1.0;
    }
  }
  return hist;
}

FeatureTensor::FeatureTensor(std::size_t blocks, std::size_t scales)
    : values_({static_cast<std::size_t>(kHistogramBins), blocks, scales}) {}

FeatureTensor::FeatureTensor(Tensor t) : values_(std::move(t)) {
  if (values_.order() != 3 || values_.dim(0) != static_cast<std::size_t>(kHistogramBins)) {
    throw UsageError("FeatureTensor: expected a 256 x blocks x scales tensor");
  }
}

std::vector<double> flatten_features(const FeatureTensor& t) {
  const auto d = t.tensor().data();
  return {d.begin(), d.end()};
}

FeatureTensor unflatten_features(const std::vector<double>& flat, std::size_t blocks,
                                 std::size_t scales) {
  return FeatureTensor(Tensor({static_cast<std::size_t>(kHistogramBins), blocks, scales}, flat));
}

HistGaborExtractor::HistGaborExtractor(const GaborBank& bank, int height, int width,
                                       const BlockGrid& grid)
    : height_(height), width_(width), grid_(grid) {
  if (height > grid.padded_height() || width > grid.padded_width()) {
    throw UsageError("HistGaborExtractor: block grid does not cover the image");
  }
  correlator_ = std::make_unique<SpectralCorrelator>(height, width, bank.max_radius());
  const auto& filters = bank.filters();
  for (const auto& group : bank.scale_groups()) {
    std::vector<ComplexFilter> complex_filters;
    std::vector<bool> used(group.size(), false);
    for (std::size_t a = 0; a < group.size(); ++a) {
      if (used[a]) continue;
      used[a] = true;
      const GaborFilter& fa = filters[group[a]];
      // Partner: same parameters, opposite part.
      std::size_t partner = group.size();
      for (std::size_t b = a + 1; b < group.size(); ++b) {
        const GaborFilter& fb = filters[group[b]];
        if (!used[b] && fb.part != fa.part && fb.params.lambda == fa.params.lambda &&
            fb.params.theta == fa.params.theta && fb.params.psi == fa.params.psi &&
            fb.params.sigma == fa.params.sigma && fb.params.gamma == fa.params.gamma) {
          partner = b;
          break;
        }
      }
      const Eigen::MatrixXd ka = bank.kernel(group[a]);
      if (partner == group.size()) {
        complex_filters.push_back({correlator_->kernel_spectrum(ka)});
        continue;
      }
      used[partner] = true;
      const Eigen::MatrixXd kb = bank.kernel(group[partner]);
      const bool a_is_real = fa.part == GaborPart::Real;
      complex_filters.push_back({a_is_real ? correlator_->kernel_spectrum(ka, &kb)
                                           : correlator_->kernel_spectrum(kb, &ka)});
    }
    groups_.push_back(std::move(complex_filters));
  }
}

std::vector<ResponseMap> HistGaborExtractor::scale_group_magnitudes(const GrayImage& img) {
  const auto image = correlator_->image_spectrum(img);
  std::vector<ResponseMap> out;
  ResponseMap re(height_, width_);
  ResponseMap im(height_, width_);
  for (const auto& group : groups_) {
    ResponseMap sum(height_, width_, 0.0);
    auto acc = sum.pixels();
    for (const auto& f : group) {
      correlator_->correlate(image, f.spectrum, re, &im);
      const auto r = re.pixels();
      const auto i = im.pixels();
      for (std::size_t p = 0; p < acc.size(); ++p) {
        acc[p] += std::sqrt(r[p] * r[p] + i[p] * i[p]);
      }
    }
    out.push_back(std::move(sum));
  }
  return out;
}

FeatureTensor HistGaborExtractor::extract(const GrayImage& img) {
  const auto maps = scale_group_magnitudes(img);
  FeatureTensor t(static_cast<std::size_t>(grid_.blocks()), maps.size());
  for (std::size_t s = 0; s < maps.size(); ++s) {
    const Eigen::MatrixXd hist = block_histograms(quantize_response(maps[s]), grid_);
    for (Eigen::Index j = 0; j < hist.cols(); ++j) {
      for (Eigen::Index b = 0; b < hist.rows(); ++b) {
        t(static_cast<std::size_t>(b), static_cast<std::size_t>(j), s) = hist(b, j);
      }
    }
  }
  return t;
}

FeatureTensor extract_feature_tensor(const GrayImage& img, const GaborBank& bank,
                                     const BlockGrid& grid) {
  HistGaborExtractor extractor(bank, img.height(), img.width(), grid);
  return extractor.extract(img);
}

namespace {
constexpr std::string_view kFeatureMagic = "HGFEAT01";
}

void save_feature_set(const std::vector<FeatureTensor>& tensors, const std::filesystem::path& path) {
  detail::BinaryWriter w(path);
  w.magic(kFeatureMagic);
  w.put(detail::kEndianTag);
  w.put(std::uint32_t{0});
  const std::size_t blocks = tensors.empty() ? 0 : tensors.front().blocks();
  const std::size_t scales = tensors.empty() ? 0 : tensors.front().scales();
  w.put(std::uint64_t{kHistogramBins});
  w.put(static_cast<std::uint64_t>(blocks));
  w.put(static_cast<std::uint64_t>(scales));
  w.put(static_cast<std::uint64_t>(tensors.size()));
  for (const auto& t : tensors) {
    if (t.blocks() != blocks || t.scales() != scales) {
      throw UsageError("save_feature_set: tensors differ in shape");
    }
    w.put_all(flatten_features(t));
  }
  w.commit();
}

std::vector<FeatureTensor> load_feature_set(const std::filesystem::path& path) {
  detail::BinaryReader r(path, kFeatureMagic);
  (void)r.get<std::uint32_t>();
  const auto bins = r.get<std::uint64_t>();
  const auto blocks = r.get<std::uint64_t>();
  const auto scales = r.get<std::uint64_t>();
  const auto count = r.get<std::uint64_t>();
  if (bins != static_cast<std::uint64_t>(kHistogramBins)) {
    throw DataError(path.string() + ": expected 256 bins, found " + std::to_string(bins));
  }
  std::vector<FeatureTensor> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    out.push_back(unflatten_features(r.get_all<double>(bins * blocks * scales), blocks, scales));
  }
  if (!r.at_end()) {
    throw DataError(path.string() + ": trailing bytes after " + std::to_string(count) +
                    " tensors");
  }
  return out;
}

void save_feature_text(const FeatureTensor& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  out << t.bins() << ' ' << t.blocks() << ' ' << t.scales() << '\n';
  out << std::setprecision(17);
  for (double v : t.tensor().data()) {
    out << v << '\n';
  }
}

}  // namespace kinship
