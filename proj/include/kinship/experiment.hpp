#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kinship/dataset.hpp"
#include "kinship/gabor.hpp"
#include "kinship/hist_features.hpp"
#include "kinship/matching.hpp"
#include "kinship/preprocess.hpp"

namespace kinship {

enum class Method { Basic, Retinex, Mask, RetinexMask };

/// "basic", "retinex", "mask", "retinex+mask". Throws UsageError otherwise.
Method parse_method(const std::string& name);
std::string method_key(Method m);
/// Row label used in the report tables.
std::string method_title(Method m);
/// Copy of `base` with the enable flags set for `m`.
PreprocConfig method_preproc(const PreprocConfig& base, Method m);

struct RunConfig {
  // Dataset: a manifest path, or a synthetic spec generated into
  // synthetic_dir (output_dir/data when empty).
  std::optional<std::filesystem::path> manifest;
  SyntheticOptions synthetic;
  std::filesystem::path synthetic_dir;

  std::vector<Method> methods{Method::Basic, Method::Retinex, Method::Mask, Method::RetinexMask};
  PreprocConfig preprocessing;

  BankSpec bank{.scales = 6};
  int blocks_y = 4;
  int blocks_x = 3;

  TxqdaConfig txqda{.target_dims = {32, 8, 4}};
  std::vector<std::size_t> d_sweep{150, 160, 170, 180, 190, 200};

  int k = 5;
  std::uint64_t seed = 7;
  int negatives_per_positive = 1;

  std::filesystem::path output_dir = "out";

  EvalConfig eval_config() const;
  std::filesystem::path dataset_dir() const;
  std::filesystem::path manifest_path() const;

  /// Throws UsageError on any inconsistent field.
  void validate() const;
};

/// Parses a JSON config; missing keys keep their defaults, unknown keys are
/// rejected. Relative paths resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
/// Every effective parameter, defaults included, as pretty-printed JSON.
std::string config_echo(const RunConfig& cfg);

/// Output file names inside output_dir.
std::filesystem::path features_path(const RunConfig& cfg, Method m);
std::filesystem::path basis_path(const RunConfig& cfg, Method m, int fold);

/// Parent and child features of every manifest entry for one method.
SampleFeatures extract_method_features(const PairManifest& manifest, const RunConfig& cfg,
                                       Method m);

/// Feature file holding all parents followed by all children.
void save_sample_features(const SampleFeatures& f, const std::filesystem::path& path);
SampleFeatures load_sample_features(const std::filesystem::path& path, std::size_t entries);

/// Loads the manifest, or generates the synthetic dataset when the config
/// asks for one and `generate` is set.
PairManifest resolve_dataset(const RunConfig& cfg, bool generate);

// Staged pipeline. Each stage names itself in any error it raises.
void stage_extract(const RunConfig& cfg);
void stage_train(const RunConfig& cfg);
std::vector<EvalReport> stage_eval(const RunConfig& cfg);

/// All stages in memory, then the reports are written.
std::vector<EvalReport> run_all(const RunConfig& cfg);

/// report.txt, report.csv and roc.csv in output_dir.
void write_reports(const RunConfig& cfg, const std::vector<EvalReport>& reports);

/// Aligned text tables: one per method, then the best d of each method.
std::string format_tables(const std::vector<EvalReport>& reports);
/// method,d,fold,accuracy,threshold rows; doubles printed round-trip exact.
std::string format_csv(const std::vector<EvalReport>& reports);
std::string format_roc_csv(const std::vector<EvalReport>& reports);
/// Inverse of format_csv (ROC points are not restored).
std::vector<EvalReport> parse_report_csv(const std::string& text);

/// Writes through a temporary sibling and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace kinship
