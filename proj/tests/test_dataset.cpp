#include <fstream>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "kinship/dataset.hpp"
#include "kinship/errors.hpp"
#include "kinship/gray_image.hpp"
#include "test_util.hpp"

using namespace kinship;
using testutil::TempDir;

namespace {

PairManifest families(int n, int per_family = 1) {
  PairManifest m;
  for (int f = 0; f < n; ++f)
    for (int r = 0; r < per_family; ++r)
      m.entries.push_back({"p" + std::to_string(f) + ".png", "c" + std::to_string(f) + ".png", f});
  return m;
}

void write_png(const std::filesystem::path& p) { save_grayscale(GrayImage(8, 8, 100.0), p); }

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

}  // namespace

TEST(LoadManifest, ParsesRowsInOrder) {
  TempDir dir("manifest");
  for (const char* n : {"a.png", "b.png", "c.png", "d.png", "e.png", "f.png"}) write_png(dir / n);
  write_text(dir / "m.csv", "# parent,child,family\na.png,b.png,0\n\nc.png,d.png,1\ne.png,f.png,2\n");
  const PairManifest m = load_manifest(dir / "m.csv");
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.entries[1].parent, "c.png");
  EXPECT_EQ(m.entries[2].family_id, 2);
  EXPECT_EQ(m.families(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(m.parent_path(0), dir.path() / "a.png");
}

TEST(LoadManifest, RejectsNegativeFamily) {
  TempDir dir("manifest");
  write_png(dir / "a.png");
  write_png(dir / "b.png");
  write_text(dir / "m.csv", "a.png,b.png,-1\n");
  EXPECT_THROW(load_manifest(dir / "m.csv"), DataError);
}

TEST(LoadManifest, ErrorsNameTheRow) {
  TempDir dir("manifest");
  write_png(dir / "a.png");
  write_png(dir / "b.png");
  write_text(dir / "m.csv", "a.png,b.png,0\na.png,b.png\n");
  try {
    load_manifest(dir / "m.csv");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}

TEST(LoadManifest, MissingFileAndMissingImage) {
  TempDir dir("manifest");
  EXPECT_THROW(load_manifest(dir / "absent.csv"), DataError);
  write_png(dir / "a.png");
  write_text(dir / "m.csv", "a.png,nope.png,0\n");
  EXPECT_THROW(load_manifest(dir / "m.csv"), DataError);
}

TEST(LoadManifest, UndecodableImage) {
  TempDir dir("manifest");
  write_png(dir / "a.png");
  write_text(dir / "bad.png", "not an image");
  write_text(dir / "m.csv", "a.png,bad.png,0\n");
  EXPECT_THROW(load_manifest(dir / "m.csv"), DataError);
}

TEST(LoadManifest, SaveRoundTripWith150Rows) {
  TempDir dir("manifest");
  write_png(dir / "x.png");
  PairManifest m;
  m.root_dir = dir.path();
  for (int f = 0; f < 150; ++f) m.entries.push_back({"x.png", "x.png", f});
  save_manifest(m, dir / "m.csv");
  const PairManifest back = load_manifest(dir / "m.csv");
  ASSERT_EQ(back.entries.size(), 150u);
  for (int f = 0; f < 150; ++f) EXPECT_EQ(back.entries[f].family_id, f);
}

TEST(MakeFolds, TenFamiliesFiveFolds) {
  const FoldAssignment folds = make_folds(families(10), 5, 3);
  for (int f = 0; f < 5; ++f) EXPECT_EQ(folds.families_in(f).size(), 2u);
}

TEST(MakeFolds, DeterministicForSeed) {
  EXPECT_EQ(make_folds(families(40), 5, 11).fold_of, make_folds(families(40), 5, 11).fold_of);
  EXPECT_NE(make_folds(families(40), 5, 11).fold_of, make_folds(families(40), 5, 12).fold_of);
}

TEST(MakeFolds, PartitionProperty) {
  for (int n : {5, 7, 23, 150}) {
    for (int k : {2, 3, 5}) {
      if (k > n) continue;
      const PairManifest m = families(n, 2);
      const FoldAssignment folds = make_folds(m, k, static_cast<std::uint64_t>(n * 31 + k));
      std::map<int, int> count;
      std::size_t total = 0;
      for (int f = 0; f < k; ++f) {
        const auto fam = folds.families_in(f);
        count[f] = static_cast<int>(fam.size());
        total += fam.size();
      }
      EXPECT_EQ(total, static_cast<std::size_t>(n));
      EXPECT_EQ(folds.fold_of.size(), static_cast<std::size_t>(n));
      int lo = n;
      int hi = 0;
      for (auto [f, c] : count) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      EXPECT_LE(hi - lo, 1);
      EXPECT_GE(lo, 1);
      // Train and test entries never share a family.
      for (int f = 0; f < k; ++f) {
        std::set<int> test_fam;
        for (auto i : folds.test_entries(m, f)) test_fam.insert(m.entries[i].family_id);
        for (auto i : folds.train_entries(m, f)) EXPECT_FALSE(test_fam.contains(m.entries[i].family_id));
        EXPECT_EQ(folds.test_entries(m, f).size() + folds.train_entries(m, f).size(), m.entries.size());
      }
    }
  }
}

TEST(MakeFolds, OneHundredFiftyFamiliesGiveFoldsOfThirty) {
  const FoldAssignment folds = make_folds(families(150), 5, 1);
  std::vector<int> count(5, 0);
  for (const auto& [fam, f] : folds.fold_of) ++count[f];
  for (int c : count) EXPECT_EQ(c, 30);
}

TEST(MakeFolds, RejectsBadK) {
  EXPECT_THROW(make_folds(families(4), 5, 1), UsageError);
  EXPECT_THROW(make_folds(families(4), 1, 1), UsageError);
}

TEST(NegativePairs, TwoFamilies) {
  const LabeledPairSet s = sample_negative_pairs(families(2), 1, 5);
  ASSERT_EQ(s.negatives.size(), 2u);
  for (const auto& p : s.negatives) EXPECT_NE(p.parent, p.child);
  EXPECT_EQ(s.positives, (std::vector<PairIndex>{{0, 0}, {1, 1}}));
}

TEST(NegativePairs, ZeroPerPositive) {
  EXPECT_TRUE(sample_negative_pairs(families(3), 0, 5).negatives.empty());
}

TEST(NegativePairs, OneFamilyIsAnError) {
  EXPECT_THROW(sample_negative_pairs(families(1, 3), 1, 5), DataError);
}

TEST(NegativePairs, ExhaustiveScanOn150Families) {
  const PairManifest m = families(150);
  const LabeledPairSet s = sample_negative_pairs(m, 1, 9);
  ASSERT_EQ(s.negatives.size(), 150u);
  std::set<PairIndex> seen;
  for (const auto& p : s.negatives) {
    EXPECT_NE(m.entries[p.parent].family_id, m.entries[p.child].family_id);
    EXPECT_TRUE(seen.insert(p).second) << "duplicate negative";
  }
  for (const auto& p : s.positives) EXPECT_FALSE(seen.contains(p));
}

TEST(NegativePairs, PropertyAcrossShapes) {
  for (int n : {2, 3, 10, 40}) {
    for (int per : {1, 2, 3}) {
      const PairManifest m = families(n, 2);
      const std::size_t available = m.entries.size() * (m.entries.size() - 2);
      const std::size_t wanted = static_cast<std::size_t>(per) * m.entries.size();
      if (wanted > available) {
        EXPECT_THROW(sample_negative_pairs(m, per, 1), DataError);
        continue;
      }
      const LabeledPairSet s = sample_negative_pairs(m, per, static_cast<std::uint64_t>(n + per));
      EXPECT_EQ(s.negatives.size(), wanted);
      std::set<PairIndex> uniq(s.negatives.begin(), s.negatives.end());
      EXPECT_EQ(uniq.size(), s.negatives.size());
      for (const auto& p : s.negatives)
        EXPECT_NE(m.entries[p.parent].family_id, m.entries[p.child].family_id);
      const LabeledPairSet again = sample_negative_pairs(m, per, static_cast<std::uint64_t>(n + per));
      EXPECT_EQ(again.negatives, s.negatives);
    }
  }
}

TEST(Synthetic, WritesLayoutAndIsReproducible) {
  TempDir a("synth");
  TempDir b("synth");
  SyntheticOptions o;
  o.n_families = 4;
  o.height = 64;
  o.width = 72;
  o.seed = 42;
  const PairManifest m = generate_synthetic_dataset(o, a.path());
  generate_synthetic_dataset(o, b.path());
  ASSERT_EQ(m.entries.size(), 4u);
  EXPECT_TRUE(std::filesystem::exists(a / "fam0_parent.png"));
  EXPECT_TRUE(std::filesystem::exists(a / "fam3_child.png"));
  EXPECT_TRUE(std::filesystem::exists(a / "manifest.csv"));
  for (const char* f : {"fam0_parent.png", "fam2_child.png", "manifest.csv"}) {
    std::ifstream fa(a / f, std::ios::binary);
    std::ifstream fb(b / f, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_EQ(sa, sb) << f;
  }
  const GrayImage img = load_grayscale(a / "fam1_parent.png");
  EXPECT_EQ(img.height(), 64);
  EXPECT_EQ(img.width(), 72);
  const PairManifest loaded = load_manifest(a / "manifest.csv");
  EXPECT_EQ(loaded.entries.size(), 4u);
}

TEST(Synthetic, ZeroNoiseChildDiffersOnlyByIllumination) {
  TempDir dir("synth");
  SyntheticOptions o;
  o.n_families = 2;
  o.height = 96;
  o.width = 96;
  o.kin_noise = 0.0;
  o.illumination = 0.0;
  generate_synthetic_dataset(o, dir.path());
  EXPECT_EQ(load_grayscale(dir / "fam0_parent.png"), load_grayscale(dir / "fam0_child.png"));
  EXPECT_NE(load_grayscale(dir / "fam0_parent.png"), load_grayscale(dir / "fam1_child.png"));
}

TEST(Synthetic, RejectsBadOptions) {
  TempDir dir("synth");
  SyntheticOptions o;
  o.n_families = 1;
  EXPECT_THROW(generate_synthetic_dataset(o, dir.path()), UsageError);
  o.n_families = 3;
  o.height = 32;
  EXPECT_THROW(generate_synthetic_dataset(o, dir.path()), UsageError);
}
