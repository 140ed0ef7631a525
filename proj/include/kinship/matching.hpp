#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kinship/dataset.hpp"
#include "kinship/tensor.hpp"
#include "kinship/txqda.hpp"

namespace kinship {

/// u.v / (|u| |v|). Throws NumericError for a zero-norm input and UsageError
/// for a length mismatch.
double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

struct ScoredPair {
  double score = 0.0;
  bool kin = false;
  int fold = 0;
};

/// Pairs scoring strictly above the threshold are declared kin.
double accuracy_at(std::span<const ScoredPair> scores, double threshold);

/// Best training accuracy over the midpoints of adjacent sorted scores, plus
/// one threshold below and one above all scores so the all-kin and
/// all-non-kin decisions are candidates too. Ties go to the larger threshold.
/// Throws DataError unless both labels are present.
double select_threshold(std::span<const ScoredPair> scores);

struct RocPoint {
  double threshold;
  double tpr;
  double fpr;
};

/// One point per distinct score (plus the all-reject point), descending in
/// threshold.
std::vector<RocPoint> roc_curve(std::span<const ScoredPair> scores);

/// Per-sample feature tensors indexed like the manifest entries.
struct SampleFeatures {
  std::vector<Tensor> parents;
  std::vector<Tensor> children;
};

struct EvalConfig {
  int k = 5;
  std::uint64_t seed = 7;
  int negatives_per_positive = 1;
  TxqdaConfig txqda;
  std::vector<std::size_t> d_sweep{190};
};

/// Negative-sampling seeds for one fold, fixed by (seed, fold).
std::uint64_t train_pair_seed(std::uint64_t seed, int fold);
std::uint64_t test_pair_seed(std::uint64_t seed, int fold);

/// Train split of a fold: TXQDA fitted on the train entries with their own
/// cross-family negatives. The basis retains max(d_sweep) coordinates.
/// Throws DataError if a family appears in both index lists.
ProjectionBasis train_fold(const PairManifest& m, const SampleFeatures& f,
                           const std::vector<std::size_t>& train_idx,
                           const std::vector<std::size_t>& test_idx, const EvalConfig& cfg,
                           int fold);

struct FoldScore {
  std::size_t d = 0;
  double accuracy = 0.0;
  double threshold = 0.0;
  std::vector<ScoredPair> test_scores;
};

/// Scores a trained fold for every d in the sweep: the threshold is learned
/// on the train pairs, accuracy measured on the test pairs.
std::vector<FoldScore> score_fold(const PairManifest& m, const SampleFeatures& f,
                                  const std::vector<std::size_t>& train_idx,
                                  const std::vector<std::size_t>& test_idx,
                                  const ProjectionBasis& basis, const EvalConfig& cfg, int fold);

/// train_fold + score_fold.
std::vector<FoldScore> evaluate_fold(const PairManifest& m, const SampleFeatures& f,
                                     const std::vector<std::size_t>& train_idx,
                                     const std::vector<std::size_t>& test_idx,
                                     const EvalConfig& cfg, int fold);

struct EvalReport {
  std::string method;
  std::size_t d = 0;
  std::vector<double> per_fold_accuracy;
  std::vector<double> threshold_per_fold;
  double mean_accuracy = 0.0;
  std::vector<std::vector<RocPoint>> roc_per_fold;
};

/// Mean of the per-fold accuracies.
double mean_of(const std::vector<double>& values);

/// One report per d in cfg.d_sweep, folds from make_folds(m, cfg.k, cfg.seed).
std::vector<EvalReport> cross_validate(const PairManifest& m, const SampleFeatures& f,
                                       const EvalConfig& cfg, const std::string& method);

/// Collects per-fold scores (fold order) into per-d reports.
std::vector<EvalReport> assemble_reports(const std::vector<std::vector<FoldScore>>& per_fold,
                                         const std::string& method);

}  // namespace kinship
