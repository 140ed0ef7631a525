// kinver: kinship verification pipeline driver.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kinship/errors.hpp"
#include "kinship/experiment.hpp"

namespace fs = std::filesystem;
using namespace kinship;

namespace {

// Flags that override the config file.
struct Overrides {
  std::optional<std::string> output_dir;
  std::optional<std::string> manifest;
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
  std::vector<std::size_t> d;
  std::vector<std::string> methods;
  std::optional<int> families;
  std::optional<double> kin_noise;
  std::optional<double> illumination;
  std::optional<std::uint64_t> synthetic_seed;

  void attach(CLI::App* app) {
    app->add_option("--output-dir", output_dir, "Output directory");
    app->add_option("--manifest", manifest, "Pair manifest (replaces the synthetic dataset)");
    app->add_option("--seed", seed, "Fold and negative-sampling seed");
    app->add_option("--k", k, "Number of folds");
    app->add_option("--d", d, "Projection sizes to sweep");
    app->add_option("--methods", methods, "basic, retinex, mask, retinex+mask");
    app->add_option("--families", families, "Synthetic families");
    app->add_option("--kin-noise", kin_noise, "Synthetic kin noise in [0, 1]");
    app->add_option("--illumination", illumination, "Synthetic illumination strength");
    app->add_option("--synthetic-seed", synthetic_seed, "Synthetic dataset seed");
  }

  void apply(RunConfig& c) const {
    if (output_dir) c.output_dir = *output_dir;
    if (manifest) c.manifest = fs::path(*manifest);
    if (seed) c.seed = *seed;
    if (k) c.k = *k;
    if (!d.empty()) c.d_sweep = d;
    if (!methods.empty()) {
      c.methods.clear();
      for (const auto& m : methods) c.methods.push_back(parse_method(m));
    }
    if (families) c.synthetic.n_families = *families;
    if (kin_noise) c.synthetic.kin_noise = *kin_noise;
    if (illumination) c.synthetic.illumination = *illumination;
    if (synthetic_seed) c.synthetic.seed = *synthetic_seed;
  }
};

RunConfig make_config(const std::optional<std::string>& path, const Overrides& o) {
  RunConfig c = path ? load_run_config(*path) : RunConfig{};
  o.apply(c);
  c.validate();
  return c;
}

int run(int argc, char** argv) {
  CLI::App app{"Kinship verification from face image pairs"};
  app.require_subcommand(1);

  SyntheticOptions synth_opts;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic kinship dataset");
  synth->add_option("--families", synth_opts.n_families, "Number of families");
  synth->add_option("--seed", synth_opts.seed, "Generator seed");
  synth->add_option("--height", synth_opts.height, "Image height");
  synth->add_option("--width", synth_opts.width, "Image width");
  synth->add_option("--kin-noise", synth_opts.kin_noise, "Share of the child texture unrelated to the parent");
  synth->add_option("--illumination", synth_opts.illumination, "Illumination field strength");
  synth->add_option("--out", synth_out, "Output directory")->required();

  std::string pre_input;
  std::string pre_output;
  std::string pre_method = "retinex+mask";
  std::optional<std::string> pre_debug;
  std::optional<std::string> pre_config;
  auto* pre = app.add_subcommand("preprocess", "Preprocess one image");
  pre->add_option("--input", pre_input, "Input image")->required();
  pre->add_option("--out", pre_output, "Output PNG")->required();
  pre->add_option("--method", pre_method, "basic, retinex, mask, retinex+mask");
  pre->add_option("--config", pre_config, "Config file for preprocessing parameters");
  pre->add_option("--debug-dir", pre_debug, "Write every intermediate stage here");

  std::optional<std::string> config_path;
  Overrides overrides;
  auto* extract = app.add_subcommand("extract", "Extract Hist-Gabor features for every method");
  auto* train = app.add_subcommand("train", "Train one TXQDA basis per method and fold");
  auto* eval = app.add_subcommand("eval", "Score the test folds and write the reports");
  auto* run_all_cmd = app.add_subcommand("run-all", "Extract, train and evaluate in one pass");
  for (auto* sub : {extract, train, eval, run_all_cmd}) {
    sub->add_option("--config", config_path, "JSON run config");
    overrides.attach(sub);
  }

  std::string report_csv;
  std::optional<std::string> report_out;
  auto* report = app.add_subcommand("report", "Render report tables from a report.csv");
  report->add_option("--csv", report_csv, "report.csv produced by eval or run-all")->required();
  report->add_option("--out", report_out, "Write the tables here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (synth->parsed()) {
    const PairManifest m = generate_synthetic_dataset(synth_opts, synth_out);
    std::cout << (fs::path(synth_out) / "manifest.csv").string() << '\n';
    std::cerr << m.entries.size() << " pairs\n";
  } else if (pre->parsed()) {
    const RunConfig c = pre_config ? load_run_config(*pre_config) : RunConfig{};
    const PreprocConfig pc = method_preproc(c.preprocessing, parse_method(pre_method));
    std::optional<fs::path> debug;
    if (pre_debug) debug = fs::path(*pre_debug);
    save_grayscale(preprocess_pipeline(pre_input, pc, debug), pre_output);
  } else if (extract->parsed()) {
    stage_extract(make_config(config_path, overrides));
  } else if (train->parsed()) {
    stage_train(make_config(config_path, overrides));
  } else if (eval->parsed()) {
    const RunConfig c = make_config(config_path, overrides);
    stage_eval(c);
    std::cout << (c.output_dir / "report.txt").string() << '\n';
  } else if (run_all_cmd->parsed()) {
    const RunConfig c = make_config(config_path, overrides);
    run_all(c);
    std::cout << (c.output_dir / "report.txt").string() << '\n';
  } else if (report->parsed()) {
    std::ifstream in(report_csv);
    if (!in) {
      throw DataError("cannot read " + report_csv);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string tables = format_tables(parse_report_csv(ss.str()));
    if (report_out) {
      write_text_atomic(*report_out, tables);
    } else {
      std::cout << tables;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
