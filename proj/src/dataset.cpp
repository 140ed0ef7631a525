#include "kinship/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "kinship/errors.hpp"
#include "kinship/gray_image.hpp"
#include "kinship/random.hpp"

namespace kinship {

namespace fs = std::filesystem;

std::vector<int> PairManifest::families() const {
  std::set<int> ids;
  for (const auto& e : entries) {
    ids.insert(e.family_id);
  }
  return {ids.begin(), ids.end()};
}

PairManifest PairManifest::subset(const std::vector<std::size_t>& indices) const {
  PairManifest out;
  out.root_dir = root_dir;
  out.entries.reserve(indices.size());
  for (std::size_t i : indices) {
    out.entries.push_back(entries.at(i));
  }
  return out;
}

std::vector<int> FoldAssignment::families_in(int fold) const {
  std::vector<int> out;
  for (const auto& [family, f] : fold_of) {
    if (f == fold) {
      out.push_back(family);
    }
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::test_entries(const PairManifest& m, int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    if (fold_of.at(m.entries[i].family_id) == fold) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_entries(const PairManifest& m, int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    if (fold_of.at(m.entries[i].family_id) != fold) {
      out.push_back(i);
    }
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

PairManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open manifest: " + path.string());
  }
  PairManifest m;
  m.root_dir = path.parent_path();

  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(trim(field));
    }
    const auto where = path.string() + ":" + std::to_string(row);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw DataError(where + ": expected 3 fields 'parent,child,family_id'");
    }
    int family = 0;
    const auto& id = fields[2];
    const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), family);
    if (ec != std::errc{} || ptr != id.data() + id.size()) {
      throw DataError(where + ": family_id '" + id + "' is not an integer");
    }
    if (family < 0) {
      throw DataError(where + ": family_id must be >= 0, got " + id);
    }
    ManifestEntry e{fields[0], fields[1], family};
    for (const auto& rel : {e.parent, e.child}) {
      const fs::path full = m.root_dir / rel;
      if (!fs::exists(full)) {
        throw DataError(where + ": image does not exist: " + full.string());
      }
      try {
        (void)load_grayscale(full);
      } catch (const DataError& err) {
        throw DataError(where + ": " + err.what());
      }
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const PairManifest& m, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write manifest: " + path.string());
  }
  out << "# parent,child,family_id\n";
  for (const auto& e : m.entries) {
    out << e.parent.generic_string() << ',' << e.child.generic_string() << ','
        << e.family_id << '\n';
  }
  if (!out) {
    throw DataError("cannot write manifest: " + path.string());
  }
}

FoldAssignment make_folds(const PairManifest& m, int k, std::uint64_t seed) {
  std::vector<int> families = m.families();
  if (k < 2) {
    throw UsageError("make_folds: k must be >= 2, got " + std::to_string(k));
  }
  if (static_cast<std::size_t>(k) > families.size()) {
    throw UsageError("make_folds: k = " + std::to_string(k) + " exceeds the " +
                     std::to_string(families.size()) + " families available");
  }
  Rng rng(seed);
  rng.shuffle(std::span<int>(families));
  FoldAssignment folds;
  folds.k = k;
  for (std::size_t i = 0; i < families.size(); ++i) {
    folds.fold_of[families[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return folds;
}

LabeledPairSet sample_negative_pairs(const PairManifest& m, int per_positive, std::uint64_t seed) {
  if (per_positive < 0) {
    throw UsageError("sample_negative_pairs: per_positive must be >= 0");
  }
  if (m.families().size() < 2) {
    throw DataError("sample_negative_pairs: need at least two families to form negatives");
  }
  LabeledPairSet set;
  const std::size_t n = m.entries.size();
  set.positives.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    set.positives.push_back({i, i});
  }

  std::vector<PairIndex> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (m.entries[i].family_id != m.entries[j].family_id) {
        candidates.push_back({i, j});
      }
    }
  }
  const std::size_t wanted = static_cast<std::size_t>(per_positive) * n;
  if (wanted > candidates.size()) {
    throw DataError("sample_negative_pairs: " + std::to_string(wanted) +
                    " negatives requested but only " + std::to_string(candidates.size()) +
                    " cross-family combinations exist");
  }
  // Partial Fisher-Yates: the first `wanted` slots become a uniform sample.
  Rng rng(seed);
  for (std::size_t i = 0; i < wanted; ++i) {
    const std::size_t j = i + rng.index(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  set.negatives.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(wanted));
  return set;
}

// ---------------------------------------------------------------------------
// Synthetic families

namespace {

struct Grating {
  double theta, wavelength, phase, amplitude;
};

struct Blob {
  double cx, cy, radius, amplitude;
};

/// Zero-mean, unit-variance latent texture.
std::vector<double> draw_texture(Rng& rng, int h, int w) {
  std::vector<Grating> gratings(3);
  for (auto& g : gratings) {
    g = {rng.uniform(0.0, std::numbers::pi), rng.uniform(14.0, 34.0),
         rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(0.5, 1.0)};
  }
  std::vector<Blob> blobs(8);
  for (auto& b : blobs) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    b = {rng.uniform(0.0, w), rng.uniform(0.0, h), rng.uniform(10.0, 30.0),
         sign * rng.uniform(0.5, 1.5)};
  }
  std::vector<double> t(static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = 0.0;
      for (const auto& g : gratings) {
        const double u = x * std::cos(g.theta) + y * std::sin(g.theta);
        v += g.amplitude * std::cos(2.0 * std::numbers::pi * u / g.wavelength + g.phase);
      }
      for (const auto& b : blobs) {
        const double dx = x - b.cx;
        const double dy = y - b.cy;
        v += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.radius * b.radius));
      }
      t[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = v;
    }
  }
  double mean = 0.0;
  for (double v : t) mean += v;
  mean /= static_cast<double>(t.size());
  double var = 0.0;
  for (double v : t) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(t.size()));
  for (double& v : t) v = (v - mean) / sd;
  return t;
}

/// Log-illumination: a ramp in a random direction plus one broad bump.
std::vector<double> draw_log_illumination(Rng& rng, int h, int w, double strength) {
  const double dir = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double bx = rng.uniform(0.0, w);
  const double by = rng.uniform(0.0, h);
  const double br = rng.uniform(0.3, 0.6) * std::max(h, w);
  const double bamp = rng.uniform(-0.5, 0.5);
  std::vector<double> l(static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double nx = 2.0 * x / (w - 1) - 1.0;
      const double ny = 2.0 * y / (h - 1) - 1.0;
      const double ramp = nx * std::cos(dir) + ny * std::sin(dir);
      const double dx = x - bx;
      const double dy = y - by;
      const double bump = bamp * std::exp(-(dx * dx + dy * dy) / (2.0 * br * br));
      l[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
          strength * (ramp + bump);
    }
  }
  return l;
}

GrayImage render(const std::vector<double>& texture, const std::vector<double>& log_light, int h,
                 int w) {
  // Reflectance in [0.1, 1] from the unit-variance texture.
  std::vector<double> v(texture.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = std::clamp(0.55 + 0.15 * texture[i], 0.1, 1.0);
    v[i] = r * std::exp(log_light[i]);
    peak = std::max(peak, v[i]);
  }
  GrayImage img(h, w);
  auto px = img.pixels();
  for (std::size_t i = 0; i < v.size(); ++i) {
    px[i] = std::round(250.0 * v[i] / peak);
  }
  return img;
}

}  // namespace

PairManifest generate_synthetic_dataset(const SyntheticOptions& opts, const fs::path& out_dir) {
  if (opts.n_families < 2) {
    throw UsageError("synthetic dataset needs at least 2 families, got " +
                     std::to_string(opts.n_families));
  }
  if (opts.height < 64 || opts.width < 64) {
    throw UsageError("synthetic images must be at least 64x64");
  }
  if (!(opts.kin_noise >= 0.0 && opts.kin_noise <= 1.0)) {
    throw UsageError("kin_noise must lie in [0, 1]");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw DataError("cannot create output directory " + out_dir.string());
  }

  const int h = opts.height;
  const int w = opts.width;
  PairManifest m;
  m.root_dir = out_dir;
  for (int f = 0; f < opts.n_families; ++f) {
    Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(f)));
    const auto family = draw_texture(rng, h, w);
    const auto fresh = draw_texture(rng, h, w);
    // Both textures have unit variance; the norm keeps the child's contrast fixed.
    const double a = 1.0 - opts.kin_noise;
    const double b = opts.kin_noise;
    const double norm = std::sqrt(a * a + b * b);
    std::vector<double> child(family.size());
    for (std::size_t i = 0; i < child.size(); ++i) {
      child[i] = (a * family[i] + b * fresh[i]) / norm;
    }
    const auto light_p = draw_log_illumination(rng, h, w, opts.illumination);
    const auto light_c = draw_log_illumination(rng, h, w, opts.illumination);

    const std::string stem = "fam" + std::to_string(f);
    ManifestEntry e{stem + "_parent.png", stem + "_child.png", f};
    save_grayscale(render(family, light_p, h, w), out_dir / e.parent);
    save_grayscale(render(child, light_c, h, w), out_dir / e.child);
    m.entries.push_back(std::move(e));
  }
  save_manifest(m, out_dir / "manifest.csv");
  return m;
}

}  // namespace kinship
