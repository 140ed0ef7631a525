#include "kinship/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kinship/errors.hpp"

namespace kinship {

using nlohmann::json;
namespace fs = std::filesystem;

Method parse_method(const std::string& name) {
  if (name == "basic") return Method::Basic;
  if (name == "retinex") return Method::Retinex;
  if (name == "mask") return Method::Mask;
  if (name == "retinex+mask") return Method::RetinexMask;
  throw UsageError("unknown method '" + name + "' (basic | retinex | mask | retinex+mask)");
}

std::string method_key(Method m) {
  switch (m) {
    case Method::Basic: return "basic";
    case Method::Retinex: return "retinex";
    case Method::Mask: return "mask";
    case Method::RetinexMask: return "retinex+mask";
  }
  return "?";
}

std::string method_title(Method m) {
  switch (m) {
    case Method::Basic: return "Basic system";
    case Method::Retinex: return "Retinex filter";
    case Method::Mask: return "Elliptical mask";
    case Method::RetinexMask: return "Retinex filter + Elliptical mask";
  }
  return "?";
}

PreprocConfig method_preproc(const PreprocConfig& base, Method m) {
  PreprocConfig c = base;
  c.enable_retinex = m == Method::Retinex || m == Method::RetinexMask;
  c.enable_mask = m == Method::Mask || m == Method::RetinexMask;
  return c;
}

EvalConfig RunConfig::eval_config() const {
  EvalConfig e;
  e.k = k;
  e.seed = seed;
  e.negatives_per_positive = negatives_per_positive;
  e.txqda = txqda;
  e.d_sweep = d_sweep;
  return e;
}

fs::path RunConfig::dataset_dir() const {
  if (manifest) {
    return manifest->parent_path();
  }
  return synthetic_dir.empty() ? output_dir / "data" : synthetic_dir;
}

fs::path RunConfig::manifest_path() const {
  return manifest ? *manifest : dataset_dir() / "manifest.csv";
}

void RunConfig::validate() const {
  preprocessing.validate();
  if (methods.empty()) {
    throw UsageError("config: no methods selected");
  }
  if (std::set<Method>(methods.begin(), methods.end()).size() != methods.size()) {
    throw UsageError("config: duplicate method");
  }
  if (blocks_y <= 0 || blocks_x <= 0) {
    throw UsageError("config: block counts must be positive");
  }
  if (d_sweep.empty()) {
    throw UsageError("config: d sweep is empty");
  }
  if (std::any_of(d_sweep.begin(), d_sweep.end(), [](std::size_t d) { return d == 0; })) {
    throw UsageError("config: d must be >= 1");
  }
  if (k < 2) {
    throw UsageError("config: k must be >= 2");
  }
  if (negatives_per_positive < 1) {
    throw UsageError("config: negatives_per_positive must be >= 1");
  }
  if (output_dir.empty()) {
    throw UsageError("config: output_dir is empty");
  }
  const std::size_t scales = effective_wavelengths(bank).size() * bank.phases_deg.size();
  const std::vector<std::size_t> input{static_cast<std::size_t>(kHistogramBins),
                                       static_cast<std::size_t>(blocks_y * blocks_x), scales};
  std::size_t product = 1;
  for (std::size_t t : txqda.target_dims) product *= t;
  const std::size_t dmax = *std::max_element(d_sweep.begin(), d_sweep.end());
  if (dmax > product) {
    throw UsageError("config: d = " + std::to_string(dmax) + " exceeds the projected size " +
                     std::to_string(product));
  }
  // Training keeps max(d_sweep) coordinates; txqda.d itself is unused here.
  TxqdaConfig t = txqda;
  t.d = dmax;
  t.validate(input);
}

namespace {

void reject_unknown(const json& j, const std::string& section, std::set<std::string> allowed) {
  if (!j.is_object()) {
    throw UsageError("config: '" + section + "' must be an object");
  }
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw UsageError("config: unknown key '" + key + "' in '" + section + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    out = j.at(key).get<T>();
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

json to_json(const RunConfig& c) {
  json dataset;
  dataset["manifest"] = c.manifest ? json(c.manifest->string()) : json(nullptr);
  dataset["synthetic"] = {{"families", c.synthetic.n_families},
                          {"height", c.synthetic.height},
                          {"width", c.synthetic.width},
                          {"kin_noise", c.synthetic.kin_noise},
                          {"illumination", c.synthetic.illumination},
                          {"seed", c.synthetic.seed}};
  dataset["synthetic_dir"] = c.dataset_dir().string();

  const PreprocConfig& p = c.preprocessing;
  json pre;
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.push_back(method_key(m));
  pre["methods"] = methods;
  pre["target_size"] = p.target_size;
  pre["crop_x"] = {p.crop_x_begin, p.crop_x_end};
  pre["crop_y"] = {p.crop_y_begin, p.crop_y_end};
  pre["retinex_sigma"] = p.retinex_sigma;
  pre["mask_fill"] = p.mask_fill;
  const Ellipse e = p.ellipse.value_or(Ellipse::inscribed(p.crop_height(), p.crop_width()));
  pre["ellipse"] = {{"x0", e.x0}, {"y0", e.y0}, {"a", e.a}, {"b", e.b}};

  json feat;
  feat["orientations_deg"] = c.bank.orientations_deg;
  feat["wavelengths"] = c.bank.wavelengths;
  feat["effective_wavelengths"] = effective_wavelengths(c.bank);
  feat["phases_deg"] = c.bank.phases_deg;
  feat["gamma"] = c.bank.gamma;
  feat["scales"] = c.bank.scales;
  feat["kernel_radius_factor"] = c.bank.kernel_radius_factor;
  feat["blocks"] = {c.blocks_y, c.blocks_x};

  json tx;
  tx["target_dims"] = c.txqda.target_dims;
  tx["iteration_max"] = c.txqda.iteration_max;
  tx["eps_stop"] = c.txqda.eps_stop;
  tx["reg"] = c.txqda.reg;
  tx["d_sweep"] = c.d_sweep;

  json ev = {{"k", c.k}, {"seed", c.seed}, {"negatives_per_positive", c.negatives_per_positive}};

  return {{"dataset", dataset},
          {"preprocessing", pre},
          {"features", feat},
          {"txqda", tx},
          {"eval", ev},
          {"output_dir", c.output_dir.string()}};
}

std::pair<int, int> read_pair(const json& j, const char* key, std::pair<int, int> def) {
  if (!j.contains(key)) {
    return def;
  }
  const auto v = j.at(key).get<std::vector<int>>();
  if (v.size() != 2) {
    throw UsageError(std::string("config: '") + key + "' needs two entries");
  }
  return {v[0], v[1]};
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  RunConfig c;
  try {
    reject_unknown(j, "config", {"dataset", "preprocessing", "features", "txqda", "eval",
                                 "output_dir"});
    if (j.contains("dataset")) {
      const json& d = j["dataset"];
      reject_unknown(d, "dataset", {"manifest", "synthetic", "synthetic_dir"});
      if (d.contains("manifest") && !d["manifest"].is_null()) {
        c.manifest = resolve(base_dir, d["manifest"].get<std::string>());
      }
      if (d.contains("synthetic")) {
        const json& s = d["synthetic"];
        reject_unknown(s, "dataset.synthetic",
                       {"families", "height", "width", "kin_noise", "illumination", "seed"});
        read(s, "families", c.synthetic.n_families);
        read(s, "height", c.synthetic.height);
        read(s, "width", c.synthetic.width);
        read(s, "kin_noise", c.synthetic.kin_noise);
        read(s, "illumination", c.synthetic.illumination);
        read(s, "seed", c.synthetic.seed);
      }
      if (d.contains("synthetic_dir")) {
        c.synthetic_dir = resolve(base_dir, d["synthetic_dir"].get<std::string>());
      }
    }
    if (j.contains("preprocessing")) {
      const json& p = j["preprocessing"];
      reject_unknown(p, "preprocessing", {"methods", "target_size", "crop_x", "crop_y",
                                          "retinex_sigma", "mask_fill", "ellipse"});
      if (p.contains("methods")) {
        c.methods.clear();
        for (const auto& m : p["methods"].get<std::vector<std::string>>()) {
          c.methods.push_back(parse_method(m));
        }
      }
      PreprocConfig& pc = c.preprocessing;
      read(p, "target_size", pc.target_size);
      std::tie(pc.crop_x_begin, pc.crop_x_end) =
          read_pair(p, "crop_x", {pc.crop_x_begin, pc.crop_x_end});
      std::tie(pc.crop_y_begin, pc.crop_y_end) =
          read_pair(p, "crop_y", {pc.crop_y_begin, pc.crop_y_end});
      read(p, "retinex_sigma", pc.retinex_sigma);
      read(p, "mask_fill", pc.mask_fill);
      if (p.contains("ellipse") && !p["ellipse"].is_null()) {
        const json& e = p["ellipse"];
        reject_unknown(e, "preprocessing.ellipse", {"x0", "y0", "a", "b"});
        Ellipse el;
        el.x0 = e.at("x0").get<double>();
        el.y0 = e.at("y0").get<double>();
        el.a = e.at("a").get<double>();
        el.b = e.at("b").get<double>();
        pc.ellipse = el;
      }
    }
    if (j.contains("features")) {
      const json& f = j["features"];
      reject_unknown(f, "features", {"orientations_deg", "wavelengths", "phases_deg", "gamma",
                                     "scales", "kernel_radius_factor", "blocks",
                                     "effective_wavelengths"});
      read(f, "orientations_deg", c.bank.orientations_deg);
      read(f, "wavelengths", c.bank.wavelengths);
      read(f, "phases_deg", c.bank.phases_deg);
      read(f, "gamma", c.bank.gamma);
      read(f, "scales", c.bank.scales);
      read(f, "kernel_radius_factor", c.bank.kernel_radius_factor);
      std::tie(c.blocks_y, c.blocks_x) = read_pair(f, "blocks", {c.blocks_y, c.blocks_x});
    }
    if (j.contains("txqda")) {
      const json& t = j["txqda"];
      reject_unknown(t, "txqda", {"target_dims", "iteration_max", "eps_stop", "reg", "d_sweep"});
      read(t, "target_dims", c.txqda.target_dims);
      read(t, "iteration_max", c.txqda.iteration_max);
      read(t, "eps_stop", c.txqda.eps_stop);
      read(t, "reg", c.txqda.reg);
      read(t, "d_sweep", c.d_sweep);
    }
    if (j.contains("eval")) {
      const json& e = j["eval"];
      reject_unknown(e, "eval", {"k", "seed", "negatives_per_positive"});
      read(e, "k", c.k);
      read(e, "seed", c.seed);
      read(e, "negatives_per_positive", c.negatives_per_positive);
    }
    if (j.contains("output_dir")) {
      c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot read config " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

std::string config_echo(const RunConfig& cfg) { return to_json(cfg).dump(2); }

fs::path features_path(const RunConfig& cfg, Method m) {
  std::string key = method_key(m);
  std::replace(key.begin(), key.end(), '+', '_');
  return cfg.output_dir / ("features_" + key + ".bin");
}

fs::path basis_path(const RunConfig& cfg, Method m, int fold) {
  std::string key = method_key(m);
  std::replace(key.begin(), key.end(), '+', '_');
  return cfg.output_dir / ("basis_" + key + "_fold" + std::to_string(fold) + ".bin");
}

SampleFeatures extract_method_features(const PairManifest& manifest, const RunConfig& cfg,
                                       Method m) {
  const PreprocConfig pre = method_preproc(cfg.preprocessing, m);
  const GaborBank bank = build_bank(cfg.bank);
  const BlockGrid grid =
      BlockGrid::covering(pre.crop_height(), pre.crop_width(), cfg.blocks_y, cfg.blocks_x);
  HistGaborExtractor extractor(bank, pre.crop_height(), pre.crop_width(), grid);
  SampleFeatures f;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    f.parents.push_back(
        extractor.extract(preprocess_image(load_grayscale(manifest.parent_path(i)), pre)).tensor());
    f.children.push_back(
        extractor.extract(preprocess_image(load_grayscale(manifest.child_path(i)), pre)).tensor());
  }
  return f;
}

void save_sample_features(const SampleFeatures& f, const fs::path& path) {
  std::vector<FeatureTensor> all;
  all.reserve(f.parents.size() + f.children.size());
  for (const auto& t : f.parents) all.emplace_back(t);
  for (const auto& t : f.children) all.emplace_back(t);
  save_feature_set(all, path);
}

SampleFeatures load_sample_features(const fs::path& path, std::size_t entries) {
  const auto all = load_feature_set(path);
  if (all.size() != 2 * entries) {
    throw DataError(path.string() + ": expected " + std::to_string(2 * entries) +
                    " tensors for " + std::to_string(entries) + " manifest entries, found " +
                    std::to_string(all.size()));
  }
  SampleFeatures f;
  for (std::size_t i = 0; i < entries; ++i) f.parents.push_back(all[i].tensor());
  for (std::size_t i = 0; i < entries; ++i) f.children.push_back(all[entries + i].tensor());
  return f;
}

PairManifest resolve_dataset(const RunConfig& cfg, bool generate) {
  if (!cfg.manifest && generate) {
    return generate_synthetic_dataset(cfg.synthetic, cfg.dataset_dir());
  }
  return load_manifest(cfg.manifest_path());
}

namespace {

// Re-raises with the stage name prefixed, keeping the error class.
template <typename F>
auto in_stage(const std::string& stage, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    throw UsageError(stage + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(stage + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(stage + ": " + e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    throw DataError(stage + ": " + e.what());
  }
}

std::string dims_string(const std::vector<std::size_t>& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    s += (i ? ", " : "") + std::to_string(dims[i]);
  }
  return s + ")";
}

void check_basis_dims(const ProjectionBasis& basis, const SampleFeatures& f,
                      const fs::path& path) {
  if (f.parents.empty()) {
    return;
  }
  const auto expected = f.parents.front().dims();
  const auto found = basis.input_dims();
  if (expected != found) {
    throw DataError(path.string() + ": basis input dims mismatch, expected " +
                    dims_string(expected) + ", found " + dims_string(found));
  }
}

}  // namespace

void stage_extract(const RunConfig& cfg) {
  in_stage("extract", [&] {
    cfg.validate();
    const PairManifest m = resolve_dataset(cfg, true);
    fs::create_directories(cfg.output_dir);
    for (Method method : cfg.methods) {
      save_sample_features(extract_method_features(m, cfg, method), features_path(cfg, method));
    }
  });
}

void stage_train(const RunConfig& cfg) {
  in_stage("train", [&] {
    cfg.validate();
    const PairManifest m = resolve_dataset(cfg, false);
    const EvalConfig ecfg = cfg.eval_config();
    const FoldAssignment folds = make_folds(m, ecfg.k, ecfg.seed);
    for (Method method : cfg.methods) {
      const SampleFeatures f = load_sample_features(features_path(cfg, method), m.entries.size());
      for (int fold = 0; fold < folds.k; ++fold) {
        const ProjectionBasis basis = train_fold(m, f, folds.train_entries(m, fold),
                                                 folds.test_entries(m, fold), ecfg, fold);
        save_basis(basis, basis_path(cfg, method, fold));
      }
    }
  });
}

std::vector<EvalReport> stage_eval(const RunConfig& cfg) {
  return in_stage("eval", [&] {
    cfg.validate();
    const PairManifest m = resolve_dataset(cfg, false);
    const EvalConfig ecfg = cfg.eval_config();
    const FoldAssignment folds = make_folds(m, ecfg.k, ecfg.seed);
    std::vector<EvalReport> reports;
    for (Method method : cfg.methods) {
      const SampleFeatures f = load_sample_features(features_path(cfg, method), m.entries.size());
      std::vector<std::vector<FoldScore>> per_fold;
      for (int fold = 0; fold < folds.k; ++fold) {
        const fs::path bp = basis_path(cfg, method, fold);
        const ProjectionBasis basis = load_basis(bp);
        check_basis_dims(basis, f, bp);
        per_fold.push_back(score_fold(m, f, folds.train_entries(m, fold),
                                      folds.test_entries(m, fold), basis, ecfg, fold));
      }
      auto r = assemble_reports(per_fold, method_key(method));
      reports.insert(reports.end(), r.begin(), r.end());
    }
    write_reports(cfg, reports);
    return reports;
  });
}

std::vector<EvalReport> run_all(const RunConfig& cfg) {
  cfg.validate();
  const PairManifest m = in_stage("dataset", [&] { return resolve_dataset(cfg, true); });
  fs::create_directories(cfg.output_dir);
  const EvalConfig ecfg = cfg.eval_config();
  const FoldAssignment folds = in_stage("folds", [&] { return make_folds(m, ecfg.k, ecfg.seed); });
  std::vector<EvalReport> reports;
  for (Method method : cfg.methods) {
    const SampleFeatures f =
        in_stage("extract", [&] { return extract_method_features(m, cfg, method); });
    std::vector<std::vector<FoldScore>> per_fold;
    for (int fold = 0; fold < folds.k; ++fold) {
      const auto train_idx = folds.train_entries(m, fold);
      const auto test_idx = folds.test_entries(m, fold);
      const ProjectionBasis basis =
          in_stage("train", [&] { return train_fold(m, f, train_idx, test_idx, ecfg, fold); });
      per_fold.push_back(in_stage(
          "eval", [&] { return score_fold(m, f, train_idx, test_idx, basis, ecfg, fold); }));
    }
    auto r = assemble_reports(per_fold, method_key(method));
    reports.insert(reports.end(), r.begin(), r.end());
  }
  in_stage("report", [&] { write_reports(cfg, reports); });
  return reports;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) {
      throw DataError("cannot write " + path.string());
    }
    out << text;
    out.close();
    if (!out) {
      throw DataError("write failed for " + path.string());
    }
  }
  fs::rename(tmp, path);
}

namespace {

std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string percent(double acc) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << acc * 100.0;
  return os.str();
}

std::string title_of(const std::string& key) {
  try {
    return method_title(parse_method(key));
  } catch (const UsageError&) {
    return key;
  }
}

void table(std::ostringstream& os, const std::vector<const EvalReport*>& rows) {
  const std::string h1 = "Method";
  const std::string h2 = "Number of features projection";
  const std::string h3 = "Mean Accuracy %";
  std::size_t w1 = h1.size();
  for (const auto* r : rows) w1 = std::max(w1, title_of(r->method).size());
  os << std::left << std::setw(static_cast<int>(w1)) << h1 << "  "
     << std::setw(static_cast<int>(h2.size())) << h2 << "  " << h3 << '\n';
  os << std::string(w1 + h2.size() + h3.size() + 4, '-') << '\n';
  for (const auto* r : rows) {
    os << std::left << std::setw(static_cast<int>(w1)) << title_of(r->method) << "  "
       << std::setw(static_cast<int>(h2.size())) << r->d << "  " << std::right
       << std::setw(static_cast<int>(h3.size())) << percent(r->mean_accuracy) << '\n';
  }
}

}  // namespace

std::string format_tables(const std::vector<EvalReport>& reports) {
  std::vector<std::string> order;
  for (const auto& r : reports) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) {
      order.push_back(r.method);
    }
  }
  std::ostringstream os;
  std::vector<const EvalReport*> best;
  for (const auto& method : order) {
    std::vector<const EvalReport*> rows;
    for (const auto& r : reports) {
      if (r.method == method) rows.push_back(&r);
    }
    os << title_of(method) << "\n\n";
    table(os, rows);
    os << '\n';
    // Highest mean; the smaller d wins a tie.
    const EvalReport* top = rows.front();
    for (const auto* r : rows) {
      if (r->mean_accuracy > top->mean_accuracy ||
          (r->mean_accuracy == top->mean_accuracy && r->d < top->d)) {
        top = r;
      }
    }
    best.push_back(top);
  }
  os << "Best projection per method\n\n";
  table(os, best);
  return os.str();
}

std::string format_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "method,d,fold,accuracy,threshold\n";
  for (const auto& r : reports) {
    for (std::size_t f = 0; f < r.per_fold_accuracy.size(); ++f) {
      os << r.method << ',' << r.d << ',' << f << ',' << exact(r.per_fold_accuracy[f]) << ','
         << exact(r.threshold_per_fold[f]) << '\n';
    }
  }
  return os.str();
}

std::string format_roc_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "method,d,fold,threshold,tpr,fpr\n";
  for (const auto& r : reports) {
    for (std::size_t f = 0; f < r.roc_per_fold.size(); ++f) {
      for (const auto& p : r.roc_per_fold[f]) {
        os << r.method << ',' << r.d << ',' << f << ',' << exact(p.threshold) << ','
           << exact(p.tpr) << ',' << exact(p.fpr) << '\n';
      }
    }
  }
  return os.str();
}

std::vector<EvalReport> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "method,d,fold,accuracy,threshold") {
    throw DataError("report csv: missing or unexpected header");
  }
  std::vector<EvalReport> reports;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != 5) {
      throw DataError("report csv row " + std::to_string(row) + ": expected 5 fields");
    }
    std::size_t d = 0;
    std::size_t fold = 0;
    double acc = 0.0;
    double thr = 0.0;
    auto num = [&](const std::string& s, auto& out) {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
      if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw DataError("report csv row " + std::to_string(row) + ": bad number '" + s + "'");
      }
    };
    num(cells[1], d);
    num(cells[2], fold);
    num(cells[3], acc);
    num(cells[4], thr);
    auto it = std::find_if(reports.begin(), reports.end(), [&](const EvalReport& r) {
      return r.method == cells[0] && r.d == d;
    });
    if (it == reports.end()) {
      reports.push_back({cells[0], d, {}, {}, 0.0, {}});
      it = std::prev(reports.end());
    }
    if (fold != it->per_fold_accuracy.size()) {
      throw DataError("report csv row " + std::to_string(row) + ": folds out of order");
    }
    it->per_fold_accuracy.push_back(acc);
    it->threshold_per_fold.push_back(thr);
  }
  for (auto& r : reports) r.mean_accuracy = mean_of(r.per_fold_accuracy);
  return reports;
}

void write_reports(const RunConfig& cfg, const std::vector<EvalReport>& reports) {
  fs::create_directories(cfg.output_dir);
  std::string txt = format_tables(reports);
  txt += "\nConfiguration\n\n" + config_echo(cfg) + "\n";
  write_text_atomic(cfg.output_dir / "report.txt", txt);
  write_text_atomic(cfg.output_dir / "report.csv", format_csv(reports));
  write_text_atomic(cfg.output_dir / "roc.csv", format_roc_csv(reports));
}

}  // namespace kinship
