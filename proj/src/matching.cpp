#include "kinship/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "kinship/errors.hpp"
#include "kinship/random.hpp"

namespace kinship {

double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) {
    throw UsageError("cosine_similarity: length mismatch " + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()));
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw NumericError("cosine_similarity: zero-norm vector");
  }
  return u.dot(v) / (nu * nv);
}

double accuracy_at(std::span<const ScoredPair> scores, double threshold) {
  if (scores.empty()) {
    return 0.0;
  }
  std::size_t correct = 0;
  for (const auto& s : scores) {
    correct += (s.score > threshold) == s.kin ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

double select_threshold(std::span<const ScoredPair> scores) {
  const bool has_kin = std::any_of(scores.begin(), scores.end(), [](auto& s) { return s.kin; });
  const bool has_non = std::any_of(scores.begin(), scores.end(), [](auto& s) { return !s.kin; });
  if (!has_kin || !has_non) {
    throw DataError("select_threshold: both kin and non-kin scores are required");
  }
  std::vector<double> sorted;
  sorted.reserve(scores.size());
  for (const auto& s : scores) sorted.push_back(s.score);
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> candidates;
  candidates.push_back(sorted.front() - 1.0);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  }
  candidates.push_back(sorted.back() + 1.0);

  // Sweep ascending: a pair is kin while score > t, so the count of correct
  // decisions changes only when t passes a score.
  std::size_t kin_total = 0;
  for (const auto& s : scores) kin_total += s.kin ? 1 : 0;
  std::vector<std::pair<double, bool>> by_score;
  for (const auto& s : scores) by_score.emplace_back(s.score, s.kin);
  std::sort(by_score.begin(), by_score.end());

  double best_t = candidates.front();
  std::size_t best_correct = 0;
  std::size_t below = 0;  // pairs with score <= t
  std::size_t kin_below = 0;
  for (double t : candidates) {
    while (below < by_score.size() && by_score[below].first <= t) {
      kin_below += by_score[below].second ? 1 : 0;
      ++below;
    }
    const std::size_t non_below = below - kin_below;
    const std::size_t correct = (kin_total - kin_below) + non_below;
    if (correct >= best_correct) {
      best_correct = correct;
      best_t = t;
    }
  }
  return best_t;
}

std::vector<RocPoint> roc_curve(std::span<const ScoredPair> scores) {
  std::size_t pos = 0;
  for (const auto& s : scores) pos += s.kin ? 1 : 0;
  const std::size_t neg = scores.size() - pos;
  std::set<double, std::greater<>> thresholds;
  for (const auto& s : scores) thresholds.insert(s.score);

  std::vector<RocPoint> roc;
  auto point = [&](double t) {
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (const auto& s : scores) {
      if (s.score > t) {
        (s.kin ? tp : fp) += 1;
      }
    }
    roc.push_back({t, pos ? static_cast<double>(tp) / pos : 0.0,
                   neg ? static_cast<double>(fp) / neg : 0.0});
  };
  for (double t : thresholds) {
    point(t);
  }
  if (!thresholds.empty()) {
    point(*thresholds.rbegin() - 1.0);
  }
  return roc;
}

std::uint64_t train_pair_seed(std::uint64_t seed, int fold) {
  return mix_seed(seed, 1000u + static_cast<std::uint64_t>(fold));
}

std::uint64_t test_pair_seed(std::uint64_t seed, int fold) {
  return mix_seed(seed, 2000u + static_cast<std::uint64_t>(fold));
}

namespace {

void check_disjoint(const PairManifest& m, const std::vector<std::size_t>& train_idx,
                    const std::vector<std::size_t>& test_idx) {
  std::set<int> train_families;
  for (std::size_t i : train_idx) train_families.insert(m.entries.at(i).family_id);
  for (std::size_t i : test_idx) {
    const int f = m.entries.at(i).family_id;
    if (train_families.contains(f)) {
      throw DataError("fold leakage: family " + std::to_string(f) +
                      " appears in both train and test splits");
    }
  }
}

std::vector<ScoredPair> score_pairs(const std::vector<Eigen::VectorXd>& parents,
                                    const std::vector<Eigen::VectorXd>& children,
                                    const LabeledPairSet& pairs, std::size_t d, int fold) {
  std::vector<ScoredPair> out;
  out.reserve(pairs.positives.size() + pairs.negatives.size());
  const auto n = static_cast<Eigen::Index>(d);
  for (const auto* list : {&pairs.positives, &pairs.negatives}) {
    const bool kin = list == &pairs.positives;
    for (const auto& p : *list) {
      out.push_back({cosine_similarity(parents[p.parent].head(n), children[p.child].head(n)), kin,
                     fold});
    }
  }
  return out;
}

std::size_t max_d(const EvalConfig& cfg) {
  if (cfg.d_sweep.empty()) {
    throw UsageError("evaluation: d sweep is empty");
  }
  return *std::max_element(cfg.d_sweep.begin(), cfg.d_sweep.end());
}

}  // namespace

ProjectionBasis train_fold(const PairManifest& m, const SampleFeatures& f,
                           const std::vector<std::size_t>& train_idx,
                           const std::vector<std::size_t>& test_idx, const EvalConfig& cfg,
                           int fold) {
  check_disjoint(m, train_idx, test_idx);
  const PairManifest train = m.subset(train_idx);
  const LabeledPairSet pairs =
      sample_negative_pairs(train, cfg.negatives_per_positive, train_pair_seed(cfg.seed, fold));
  TrainTensors data;
  for (std::size_t i : train_idx) {
    data.parents.push_back(f.parents.at(i));
    data.children.push_back(f.children.at(i));
  }
  TxqdaConfig tcfg = cfg.txqda;
  tcfg.d = max_d(cfg);
  return train_txqda(data, pairs, tcfg);
}

std::vector<FoldScore> score_fold(const PairManifest& m, const SampleFeatures& f,
                                  const std::vector<std::size_t>& train_idx,
                                  const std::vector<std::size_t>& test_idx,
                                  const ProjectionBasis& basis, const EvalConfig& cfg, int fold) {
  check_disjoint(m, train_idx, test_idx);
  const std::size_t full = max_d(cfg);
  if (full > basis.feature_rank.size()) {
    throw UsageError("evaluation: d = " + std::to_string(full) + " exceeds the basis' " +
                     std::to_string(basis.feature_rank.size()) + " coordinates");
  }
  auto project_all = [&](const std::vector<std::size_t>& idx, const std::vector<Tensor>& view) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(project(view.at(i), basis, full));
    return out;
  };
  const auto train_p = project_all(train_idx, f.parents);
  const auto train_c = project_all(train_idx, f.children);
  const auto test_p = project_all(test_idx, f.parents);
  const auto test_c = project_all(test_idx, f.children);

  const LabeledPairSet train_pairs = sample_negative_pairs(
      m.subset(train_idx), cfg.negatives_per_positive, train_pair_seed(cfg.seed, fold));
  const LabeledPairSet test_pairs = sample_negative_pairs(
      m.subset(test_idx), cfg.negatives_per_positive, test_pair_seed(cfg.seed, fold));

  std::vector<FoldScore> out;
  for (std::size_t d : cfg.d_sweep) {
    const auto train_scores = score_pairs(train_p, train_c, train_pairs, d, fold);
    FoldScore fs;
    fs.d = d;
    fs.threshold = select_threshold(train_scores);
    fs.test_scores = score_pairs(test_p, test_c, test_pairs, d, fold);
    fs.accuracy = accuracy_at(fs.test_scores, fs.threshold);
    out.push_back(std::move(fs));
  }
  return out;
}

std::vector<FoldScore> evaluate_fold(const PairManifest& m, const SampleFeatures& f,
                                     const std::vector<std::size_t>& train_idx,
                                     const std::vector<std::size_t>& test_idx,
                                     const EvalConfig& cfg, int fold) {
  const ProjectionBasis basis = train_fold(m, f, train_idx, test_idx, cfg, fold);
  return score_fold(m, f, train_idx, test_idx, basis, cfg, fold);
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) {
    return 0.0;
  }
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<EvalReport> assemble_reports(const std::vector<std::vector<FoldScore>>& per_fold,
                                         const std::string& method) {
  std::vector<EvalReport> reports;
  if (per_fold.empty()) {
    return reports;
  }
  for (std::size_t j = 0; j < per_fold.front().size(); ++j) {
    EvalReport r;
    r.method = method;
    r.d = per_fold.front()[j].d;
    for (const auto& fold : per_fold) {
      const FoldScore& fs = fold.at(j);
      r.per_fold_accuracy.push_back(fs.accuracy);
      r.threshold_per_fold.push_back(fs.threshold);
      r.roc_per_fold.push_back(roc_curve(fs.test_scores));
    }
    r.mean_accuracy = mean_of(r.per_fold_accuracy);
    reports.push_back(std::move(r));
  }
  return reports;
}

std::vector<EvalReport> cross_validate(const PairManifest& m, const SampleFeatures& f,
                                       const EvalConfig& cfg, const std::string& method) {
  const FoldAssignment folds = make_folds(m, cfg.k, cfg.seed);
  std::vector<std::vector<FoldScore>> per_fold;
  for (int fold = 0; fold < folds.k; ++fold) {
    per_fold.push_back(evaluate_fold(m, f, folds.train_entries(m, fold),
                                     folds.test_entries(m, fold), cfg, fold));
  }
  return assemble_reports(per_fold, method);
}

}  // namespace kinship
