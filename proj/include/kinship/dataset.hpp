#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

namespace kinship {

struct ManifestEntry {
  std::filesystem::path parent;  // relative to PairManifest::root_dir
  std::filesystem::path child;
  int family_id = 0;
};

/// Labeled parent/child pairs. A positive pair shares family_id.
struct PairManifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path root_dir;

  std::filesystem::path parent_path(std::size_t i) const { return root_dir / entries[i].parent; }
  std::filesystem::path child_path(std::size_t i) const { return root_dir / entries[i].child; }

  /// Distinct family ids in ascending order.
  std::vector<int> families() const;

  /// Entries whose indices are listed, preserving order.
  PairManifest subset(const std::vector<std::size_t>& indices) const;
};

/// Family-level k-fold partition.
struct FoldAssignment {
  int k = 0;
  std::map<int, int> fold_of;  // family_id -> fold in [0, k)

  std::vector<int> families_in(int fold) const;

  /// Indices of manifest entries whose family is (or is not) in `fold`.
  std::vector<std::size_t> test_entries(const PairManifest& m, int fold) const;
  std::vector<std::size_t> train_entries(const PairManifest& m, int fold) const;
};

/// Index into the parent view and the child view of the same manifest.
struct PairIndex {
  std::size_t parent = 0;
  std::size_t child = 0;
  bool operator==(const PairIndex&) const = default;
  auto operator<=>(const PairIndex&) const = default;
};

struct LabeledPairSet {
  std::vector<PairIndex> positives;
  std::vector<PairIndex> negatives;
};

/// Parses `parent,child,family_id` records (paths relative to the manifest's
/// directory; '#' lines and blank lines skipped). Every image must exist and
/// decode. Throws DataError naming the offending row.
PairManifest load_manifest(const std::filesystem::path& path);

/// Writes the manifest in the format load_manifest reads.
void save_manifest(const PairManifest& m, const std::filesystem::path& path);

/// Shuffles families with `seed` and deals them round-robin, so fold sizes
/// differ by at most one family. Throws UsageError if k < 2 or k > #families.
FoldAssignment make_folds(const PairManifest& m, int k, std::uint64_t seed);

/// Positives are the manifest rows (i, i). Negatives are drawn uniformly
/// without replacement from the cross-family (parent i, child j) combinations,
/// `per_positive` per positive. Throws DataError when fewer than two families
/// exist or not enough cross-family combinations remain.
LabeledPairSet sample_negative_pairs(const PairManifest& m, int per_positive, std::uint64_t seed);

struct SyntheticOptions {
  int n_families = 50;
  int height = 200;
  int width = 200;
  double kin_noise = 0.2;
  // Log-amplitude of the per-image multiplicative illumination field. The
  // field spans roughly exp(+-illumination) across the image.
  double illumination = 0.25;
  std::uint64_t seed = 1;
};

/// Draws a latent texture per family (oriented gratings plus a blob layout).
/// The parent shows the texture, the child shows a blend of it with an
/// independent texture weighted by kin_noise, and each image carries its own
/// smooth multiplicative illumination field. Writes fam<id>_parent.png,
/// fam<id>_child.png and manifest.csv into out_dir.
PairManifest generate_synthetic_dataset(const SyntheticOptions& opts,
                                        const std::filesystem::path& out_dir);

}  // namespace kinship
