#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "kinship/errors.hpp"
#include "kinship/matching.hpp"
#include "test_util.hpp"

using namespace kinship;

namespace {

std::vector<ScoredPair> random_scores(std::size_t n, std::uint64_t seed, bool discrete) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<ScoredPair> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i].kin = i % 2 == 0 || gen() % 5 == 0;
    const double v = g(gen) + (s[i].kin ? 0.8 : 0.0);
    s[i].score = discrete ? std::round(v * 3.0) / 3.0 : v;
  }
  return s;
}

double oracle_best(const std::vector<ScoredPair>& s) {
  std::vector<double> scores;
  std::vector<bool> kin;
  for (const auto& p : s) {
    scores.push_back(p.score);
    kin.push_back(p.kin);
  }
  return oracle::best_accuracy(scores, kin);
}

// Families whose parent and child tensors share a latent pattern.
struct Fixture {
  PairManifest manifest;
  SampleFeatures features;
};

Fixture make_fixture(int families, double noise, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Fixture f;
  for (int c = 0; c < families; ++c) {
    f.manifest.entries.push_back({"p" + std::to_string(c), "c" + std::to_string(c), c});
    Tensor latent({6, 5, 4});
    for (double& v : latent.data()) v = n(gen);
    Tensor x = latent;
    Tensor z = latent;
    for (double& v : x.data()) v += noise * n(gen);
    for (double& v : z.data()) v += noise * n(gen);
    f.features.parents.push_back(x);
    f.features.children.push_back(z);
  }
  return f;
}

EvalConfig small_eval() {
  EvalConfig cfg;
  cfg.txqda.target_dims = {3, 3, 2};
  cfg.d_sweep = {8, 12, 18};
  return cfg;
}

}  // namespace

TEST(Cosine, KnownValues) {
  EXPECT_DOUBLE_EQ(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 0)), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(-2, 0)), -1.0);
  EXPECT_NEAR(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 3)), 0.0, 1e-16);
  EXPECT_NEAR(cosine_similarity(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 0)), std::sqrt(0.5), 1e-15);
}

TEST(Cosine, Errors) {
  EXPECT_THROW(cosine_similarity(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)), NumericError);
  EXPECT_THROW(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 0, 0)), UsageError);
}

TEST(Cosine, PositiveScaleInvarianceAndRange) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd u(9);
    Eigen::VectorXd v(9);
    for (int i = 0; i < 9; ++i) {
      u(i) = g(gen);
      v(i) = g(gen);
    }
    const double c = cosine_similarity(u, v);
    EXPECT_LE(std::abs(c), 1.0 + 1e-15);
    EXPECT_NEAR(cosine_similarity(3.5 * u, 0.01 * v), c, 1e-14);
    EXPECT_NEAR(cosine_similarity(v, u), c, 1e-15);
  }
}

TEST(Threshold, SeparableScoresPickTheGapMidpoint) {
  const std::vector<ScoredPair> s{{0.1, false}, {0.2, false}, {0.4, false},
                                  {0.6, true},  {0.8, true},  {0.9, true}};
  const double t = select_threshold(s);
  EXPECT_DOUBLE_EQ(t, 0.5);
  EXPECT_DOUBLE_EQ(accuracy_at(s, t), 1.0);
}

TEST(Threshold, StrictRuleAtEqualScore) {
  const std::vector<ScoredPair> s{{0.5, true}, {0.5, false}};
  EXPECT_DOUBLE_EQ(accuracy_at(s, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(accuracy_at(s, 0.4), 0.5);
  EXPECT_DOUBLE_EQ(accuracy_at(std::vector<ScoredPair>{{0.5, false}}, 0.5), 1.0);
}

TEST(Threshold, TiesGoToTheLargerThreshold) {
  // 0.5 and 2.5 both reach 0.75; the rule keeps 2.5.
  const std::vector<ScoredPair> s{{0.0, false}, {1.0, true}, {2.0, false}, {3.0, true}};
  const double t = select_threshold(s);
  EXPECT_DOUBLE_EQ(accuracy_at(s, t), oracle_best(s));
  for (double cand : {-1.0, 0.5, 1.5, 2.5, 4.0})
    if (accuracy_at(s, cand) == accuracy_at(s, t)) {
      EXPECT_LE(cand, t);
    }
}

TEST(Threshold, SingleLabelRejected) {
  const std::vector<ScoredPair> s{{0.1, true}, {0.2, true}};
  EXPECT_THROW(select_threshold(s), DataError);
  EXPECT_THROW(select_threshold(std::vector<ScoredPair>{}), DataError);
}

TEST(Threshold, OptimalAgainstBruteForce) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 2 + seed * 3;
    for (bool discrete : {false, true}) {
      auto s = random_scores(n, seed, discrete);
      s[0].kin = true;
      s[1].kin = false;
      const double t = select_threshold(s);
      EXPECT_DOUBLE_EQ(accuracy_at(s, t), oracle_best(s)) << "seed " << seed;
    }
  }
}

TEST(Threshold, MonotoneTransformKeepsAccuracy) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = random_scores(80, 100 + seed, false);
    auto mapped = s;
    for (auto& p : mapped) p.score = std::exp(2.0 * p.score) + 5.0;
    EXPECT_DOUBLE_EQ(accuracy_at(s, select_threshold(s)), accuracy_at(mapped, select_threshold(mapped)));
  }
}

TEST(Threshold, LabelFlipComplementsAtFixedThreshold) {
  auto s = random_scores(50, 3, false);
  auto flipped = s;
  for (auto& p : flipped) p.kin = !p.kin;
  for (double t : {-1.0, 0.0, 0.3, 1.2}) EXPECT_NEAR(accuracy_at(s, t) + accuracy_at(flipped, t), 1.0, 1e-15);
  const double a = accuracy_at(s, select_threshold(s));
  EXPECT_GE(accuracy_at(flipped, select_threshold(flipped)), 1.0 - a);
}

TEST(Roc, EndpointsAndMonotone) {
  const auto s = random_scores(40, 9, true);
  const auto roc = roc_curve(s);
  ASSERT_GE(roc.size(), 2u);
  EXPECT_DOUBLE_EQ(roc.front().tpr, 0.0);
  EXPECT_DOUBLE_EQ(roc.front().fpr, 0.0);
  EXPECT_DOUBLE_EQ(roc.back().tpr, 1.0);
  EXPECT_DOUBLE_EQ(roc.back().fpr, 1.0);
  for (std::size_t i = 1; i < roc.size(); ++i) {
    EXPECT_LT(roc[i].threshold, roc[i - 1].threshold);
    EXPECT_GE(roc[i].tpr, roc[i - 1].tpr);
    EXPECT_GE(roc[i].fpr, roc[i - 1].fpr);
  }
}

TEST(Seeds, DistinctPerFoldAndSplit) {
  std::set<std::uint64_t> seen;
  for (int f = 0; f < 5; ++f) {
    seen.insert(train_pair_seed(7, f));
    seen.insert(test_pair_seed(7, f));
  }
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_EQ(train_pair_seed(7, 2), train_pair_seed(7, 2));
  EXPECT_NE(train_pair_seed(7, 2), train_pair_seed(8, 2));
}

TEST(CrossValidation, LeakageGuard) {
  const Fixture fx = make_fixture(10, 0.3, 1);
  const EvalConfig cfg = small_eval();
  const std::vector<std::size_t> train{0, 1, 2, 3, 4, 5};
  const std::vector<std::size_t> test{5, 6, 7, 8};
  try {
    train_fold(fx.manifest, fx.features, train, test, cfg, 0);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("leakage"), std::string::npos) << e.what();
  }
}

TEST(CrossValidation, ShapeAndMean) {
  const Fixture fx = make_fixture(30, 0.4, 2);
  const EvalConfig cfg = small_eval();
  const auto reports = cross_validate(fx.manifest, fx.features, cfg, "m");
  ASSERT_EQ(reports.size(), cfg.d_sweep.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    EXPECT_EQ(r.method, "m");
    EXPECT_EQ(r.d, cfg.d_sweep[i]);
    ASSERT_EQ(r.per_fold_accuracy.size(), 5u);
    ASSERT_EQ(r.threshold_per_fold.size(), 5u);
    ASSERT_EQ(r.roc_per_fold.size(), 5u);
    double sum = 0.0;
    for (double a : r.per_fold_accuracy) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
      sum += a;
    }
    EXPECT_NEAR(r.mean_accuracy, sum / 5.0, 1e-15);
  }
  EXPECT_GT(reports.back().mean_accuracy, 0.8);
}

TEST(CrossValidation, Deterministic) {
  const Fixture fx = make_fixture(20, 0.5, 3);
  const EvalConfig cfg = small_eval();
  const auto a = cross_validate(fx.manifest, fx.features, cfg, "m");
  const auto b = cross_validate(fx.manifest, fx.features, cfg, "m");
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].per_fold_accuracy, b[i].per_fold_accuracy);
    EXPECT_EQ(a[i].threshold_per_fold, b[i].threshold_per_fold);
  }
}

TEST(CrossValidation, ResubstitutionOnSeparableDataIsPerfect) {
  // Score the training split itself: a separable set must be classified perfectly.
  const Fixture fx = make_fixture(20, 0.05, 4);
  const EvalConfig cfg = small_eval();
  std::vector<std::size_t> train(10);
  std::iota(train.begin(), train.end(), std::size_t{0});
  std::vector<std::size_t> test{10, 11, 12, 13, 14, 15, 16, 17, 18, 19};
  const ProjectionBasis basis = train_fold(fx.manifest, fx.features, train, test, cfg, 0);
  const LabeledPairSet pairs = sample_negative_pairs(fx.manifest.subset(train), 1, 3);
  for (std::size_t d : cfg.d_sweep) {
    std::vector<ScoredPair> scored;
    auto add = [&](const std::vector<PairIndex>& list, bool kin) {
      for (const auto& p : list)
        scored.push_back({cosine_similarity(project(fx.features.parents[train[p.parent]], basis, d),
                                            project(fx.features.children[train[p.child]], basis, d)),
                          kin});
    };
    add(pairs.positives, true);
    add(pairs.negatives, false);
    EXPECT_DOUBLE_EQ(accuracy_at(scored, select_threshold(scored)), 1.0) << "d " << d;
  }
}

TEST(CrossValidation, ShuffledLabelsGiveChance) {
  // Children are drawn independently of their parents, so kinship carries
  // no signal.
  Fixture fx = make_fixture(50, 0.3, 5);
  const Fixture other = make_fixture(50, 0.3, 6);
  fx.features.children = other.features.children;
  const EvalConfig cfg = small_eval();
  const auto reports = cross_validate(fx.manifest, fx.features, cfg, "m");
  for (const auto& r : reports) {
    EXPECT_GE(r.mean_accuracy, 0.35) << "d " << r.d;
    EXPECT_LE(r.mean_accuracy, 0.65) << "d " << r.d;
  }
}

TEST(CrossValidation, AssembleKeepsFoldOrder) {
  std::vector<std::vector<FoldScore>> per_fold(3);
  for (int f = 0; f < 3; ++f) {
    per_fold[f].push_back({10, 0.5 + 0.1 * f, 0.01 * f, {{0.2, true, f}}});
    per_fold[f].push_back({20, 0.6, 0.02, {{0.3, false, f}}});
  }
  const auto r = assemble_reports(per_fold, "x");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].d, 10u);
  EXPECT_EQ(r[0].per_fold_accuracy, (std::vector<double>{0.5, 0.6, 0.7}));
  EXPECT_NEAR(r[0].mean_accuracy, 0.6, 1e-15);
  EXPECT_DOUBLE_EQ(mean_of({1.0, 2.0, 6.0}), 3.0);
}
