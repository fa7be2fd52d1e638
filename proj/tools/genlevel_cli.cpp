/*
 * Copyright 2026 The genlevel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// genlevel command-line tool.
//
//   genlevel stats           --train T [--test S] [--c-values 2,5,6,7]
//   genlevel dump-contextual --data D --c N [--out F]
//   genlevel train-context   --train T [--test S] --out DIR [encoder/model flags]
//   genlevel train-features  --train T [--test S] --out DIR [--model KIND]
//   genlevel evaluate        --run-dir DIR [--test S] [--out DIR]
//   genlevel predict         --run-dir DIR --data D [--out F]
//   genlevel sweep-c         --train T --test S --out DIR [--c-values ...]
//
// Every option may also come from an INI file given with --config; flags on
// the command line take precedence. Directory outputs are assembled under
// "<out>.partial" and renamed into place only when the command succeeds.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "genlevel/genlevel.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- C API plumbing -------------------------------------------------------

class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check(gl_status status) {
  if (status != GL_OK) {
    throw CommandError(std::string(gl_status_name(status)) + ": " + gl_last_error());
  }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using Dataset = std::unique_ptr<gl_dataset, Deleter<gl_dataset, gl_dataset_free>>;
using Provider = std::unique_ptr<gl_provider, Deleter<gl_provider, gl_provider_free>>;
using ContextModel = std::unique_ptr<gl_context_model, Deleter<gl_context_model, gl_context_free>>;
using FeatureModel = std::unique_ptr<gl_feature_model, Deleter<gl_feature_model, gl_feature_free>>;
using Eval = std::unique_ptr<gl_eval, Deleter<gl_eval, gl_eval_free>>;

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  gl_string_free(s);
  return out;
}

Dataset load_dataset(const std::string& path, gl_split split) {
  gl_dataset* ds = nullptr;
  check(gl_dataset_load(path.c_str(), split, &ds));
  return Dataset(ds);
}

Dataset filter_dataset(const gl_dataset* ds, int c) {
  gl_dataset* out = nullptr;
  check(gl_dataset_filter(ds, c, &out));
  return Dataset(out);
}

int num_candidates(const gl_dataset* ds, std::size_t i) {
  int m = 0;
  check(gl_dataset_num_candidates(ds, i, &m));
  return m;
}

// ---- files ----------------------------------------------------------------

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CommandError("cannot open " + path.string() + " for writing");
  out << contents;
  if (!out.flush()) throw CommandError("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A directory built under "<final>.partial" and renamed on commit. If the
// command fails before commit, the partial directory is removed.
class StagedDir {
 public:
  explicit StagedDir(fs::path final_path)
      : final_(std::move(final_path)), partial_(final_.string() + ".partial") {
    if (final_.empty()) throw CommandError("output directory not set");
    fs::remove_all(partial_);
    fs::create_directories(partial_);
  }
  StagedDir(const StagedDir&) = delete;
  StagedDir& operator=(const StagedDir&) = delete;
  ~StagedDir() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(partial_, ec);
    }
  }

  fs::path operator/(const std::string& name) const { return partial_ / name; }
  void write(const std::string& name, const std::string& contents) const {
    write_file(partial_ / name, contents);
  }

  void commit() {
    fs::remove_all(final_);
    fs::rename(partial_, final_);
    committed_ = true;
  }

 private:
  fs::path final_;
  fs::path partial_;
  bool committed_ = false;
};

// Same protocol for a single output file; an empty path means stdout.
class StagedFile {
 public:
  explicit StagedFile(fs::path final_path) : final_(std::move(final_path)) {}
  StagedFile(const StagedFile&) = delete;
  StagedFile& operator=(const StagedFile&) = delete;
  ~StagedFile() {
    if (!partial_.empty()) {
      std::error_code ec;
      fs::remove(partial_, ec);
    }
  }

  void emit(const std::string& contents) {
    if (final_.empty()) {
      std::cout << contents;
      return;
    }
    if (final_.has_parent_path()) fs::create_directories(final_.parent_path());
    partial_ = final_.string() + ".partial";
    write_file(partial_, contents);
    fs::rename(partial_, final_);
    partial_.clear();
  }

 private:
  fs::path final_;
  fs::path partial_;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

// ---- shared option groups -------------------------------------------------

struct EncoderOptions {
  std::string kind = "hashed";
  std::string store;
  std::size_t dim = 768;
  std::size_t ngram = 3;

  void add(CLI::App* cmd) {
    cmd->add_option("--encoder", kind, "Sentence encoder: hashed or store")
        ->check(CLI::IsMember({"hashed", "store"}))
        ->capture_default_str();
    cmd->add_option("--store", store, "PIEM embedding store (encoder=store)");
    cmd->add_option("--dim", dim, "Hashed embedding dimension")->capture_default_str();
    cmd->add_option("--ngram", ngram, "Hashed character n-gram length")->capture_default_str();
  }

  json to_json() const {
    return {{"kind", kind}, {"store", store}, {"dim", dim}, {"ngram", ngram}};
  }

  static EncoderOptions from_json(const json& j) {
    EncoderOptions e;
    e.kind = j.at("kind").get<std::string>();
    e.store = j.at("store").get<std::string>();
    e.dim = j.at("dim").get<std::size_t>();
    e.ngram = j.at("ngram").get<std::size_t>();
    return e;
  }

  Provider open() const {
    gl_provider* p = nullptr;
    if (kind == "store") {
      if (store.empty()) throw CommandError("--encoder store requires --store");
      check(gl_provider_store(store.c_str(), &p));
    } else {
      check(gl_provider_hashed(dim, ngram, &p));
    }
    return Provider(p);
  }
};

struct ContextOptions {
  int batch_size = 2;
  int max_epochs = 20;
  std::optional<double> learning_rate;
  double weight_decay = 1e-4;
  int logit_sign = -1;
  int patience = 3;
  std::string validation = "holdout";
  double holdout_fraction = 0.1;
  std::string pad = "[PAD]";

  void add(CLI::App* cmd) {
    cmd->add_option("--batch-size", batch_size)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--epochs", max_epochs, "Maximum training epochs")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--lr", learning_rate,
                    "AdamW learning rate (default 1e-2 hashed, 1e-6 store)");
    cmd->add_option("--weight-decay", weight_decay)->capture_default_str();
    cmd->add_option("--logit-sign", logit_sign, "Sign applied to scores before softmax")
        ->check(CLI::IsMember({-1, 1}))
        ->capture_default_str();
    cmd->add_option("--patience", patience, "Early-stopping patience")->capture_default_str();
    cmd->add_option("--validation", validation, "holdout, none or loo")
        ->check(CLI::IsMember({"holdout", "none", "loo"}))
        ->capture_default_str();
    cmd->add_option("--holdout-fraction", holdout_fraction)
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--pad", pad, "Pad token")->capture_default_str();
  }

  gl_context_config config(const gl_provider* provider, int c, std::uint64_t seed) const {
    gl_context_config cfg;
    gl_context_config_init(&cfg, provider);
    cfg.max_candidates = c;
    cfg.batch_size = static_cast<std::size_t>(batch_size);
    cfg.max_epochs = max_epochs;
    if (learning_rate) cfg.learning_rate = *learning_rate;
    cfg.weight_decay = weight_decay;
    cfg.logit_sign = logit_sign;
    cfg.early_stop_patience = patience;
    cfg.validation = validation == "none"  ? GL_VALIDATION_NONE
                     : validation == "loo" ? GL_VALIDATION_LEAVE_ONE_OUT
                                           : GL_VALIDATION_HOLDOUT;
    cfg.holdout_fraction = holdout_fraction;
    cfg.seed = seed;
    cfg.pad_token = pad.c_str();
    return cfg;
  }
};

struct FeatureOptions {
  std::string model = "stacking";
  std::string criterion = "gini";
  int max_depth = 8;
  int n_trees = 50;
  bool no_bootstrap = false;
  int boost_rounds = 50;
  double boost_lr = 0.1;
  int boost_depth = 3;
  int folds = 5;

  void add(CLI::App* cmd, bool with_baselines) {
    std::vector<std::string> kinds = {"stacking", "tree", "forest", "boosted"};
    if (with_baselines) {
      kinds.push_back("most-frequent");
      kinds.push_back("first-candidate");
    }
    cmd->add_option("--model", model, "Model kind")
        ->check(CLI::IsMember(kinds))
        ->capture_default_str();
    cmd->add_option("--criterion", criterion, "Split criterion: gini or entropy")
        ->check(CLI::IsMember({"gini", "entropy"}))
        ->capture_default_str();
    cmd->add_option("--max-depth", max_depth)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--trees", n_trees, "Forest size")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_flag("--no-bootstrap", no_bootstrap, "Fit forest trees on the full sample");
    cmd->add_option("--boost-rounds", boost_rounds)->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd->add_option("--boost-lr", boost_lr)->capture_default_str();
    cmd->add_option("--boost-depth", boost_depth)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--folds", folds, "Stacking folds")->check(CLI::Range(2, 1000))->capture_default_str();
  }

  bool is_baseline() const { return model == "most-frequent" || model == "first-candidate"; }

  gl_feature_config config(std::uint64_t seed) const {
    gl_feature_config cfg;
    gl_feature_config_init(&cfg);
    cfg.kind = model == "tree"     ? GL_FEATURE_TREE
               : model == "forest" ? GL_FEATURE_FOREST
               : model == "boosted" ? GL_FEATURE_BOOSTED
                                    : GL_FEATURE_STACKING;
    cfg.criterion = criterion == "entropy" ? GL_CRITERION_ENTROPY : GL_CRITERION_GINI;
    cfg.max_depth = max_depth;
    cfg.n_trees = n_trees;
    cfg.bootstrap = no_bootstrap ? 0 : 1;
    cfg.boost_rounds = boost_rounds;
    cfg.boost_learning_rate = boost_lr;
    cfg.boost_depth = boost_depth;
    cfg.folds = folds;
    cfg.seed = seed;
    return cfg;
  }
};

// ---- evaluation output ----------------------------------------------------

struct Scored {
  double majority = 0.0;
  double all = 0.0;
  double literal[3] = {0, 0, 0};
  double support[3] = {0, 0, 0};
};

Scored scored(const gl_eval* ev) {
  Scored s;
  s.majority = gl_eval_majority_vote(ev);
  s.all = gl_eval_all_selections(ev);
  gl_eval_weighted(ev, GL_WEIGHTING_LITERAL, s.literal);
  gl_eval_weighted(ev, GL_WEIGHTING_SUPPORT, s.support);
  return s;
}

Eval evaluate(const gl_dataset* ds, const std::vector<int>& levels, int num_levels) {
  gl_eval* ev = nullptr;
  check(gl_evaluate(ds, levels.data(), levels.size(), num_levels, &ev));
  return Eval(ev);
}

std::string report(const gl_eval* ev, gl_report_format format) {
  char* out = nullptr;
  check(gl_eval_report(ev, format, &out));
  return take(out);
}

// Writes metrics.json, metrics.txt and both confusion CSVs.
void write_metrics(const StagedDir& dir, const gl_eval* ev, const std::string& split,
                   std::size_t total, std::size_t kept) {
  json metrics = json::parse(report(ev, GL_REPORT_JSON));
  metrics["split"] = split;
  metrics["records_total"] = total;
  metrics["records_evaluated"] = kept;
  metrics["records_excluded"] = total - kept;
  dir.write("metrics.json", metrics.dump(2) + "\n");
  dir.write("metrics.txt", "split: " + split + " (" + std::to_string(kept) + " of " +
                               std::to_string(total) + " records)\n" +
                               report(ev, GL_REPORT_TEXT));
  dir.write("confusion_counts.csv", report(ev, GL_REPORT_CONFUSION_COUNTS_CSV));
  dir.write("confusion_normalized.csv", report(ev, GL_REPORT_CONFUSION_NORMALIZED_CSV));
}

// ---- trained runs ---------------------------------------------------------

// A trained model of any kind, restored from or about to be saved to a run
// directory.
struct Run {
  std::string model;  // context, features or baseline
  std::string kind;   // feature/baseline kind
  int c = 7;
  std::uint64_t seed = 0;
  std::string pad = "[PAD]";
  EncoderOptions encoder;
  int baseline_level = 1;
  ContextModel context;
  FeatureModel features;

  json manifest(const std::string& train, const std::string& test) const {
    json j = {{"format", "genlevel-run"}, {"version", 1},     {"model", model},
              {"kind", kind},             {"c", c},           {"seed", seed},
              {"pad_token", pad},         {"train", train},   {"test", test},
              {"model_file", "model.json"}};
    if (model == "context") j["encoder"] = encoder.to_json();
    if (model == "baseline") j["baseline_level"] = baseline_level;
    return j;
  }

  void save_model(const fs::path& path) const {
    if (model == "context") {
      check(gl_context_save(context.get(), path.string().c_str()));
    } else if (model == "features") {
      check(gl_feature_save(features.get(), path.string().c_str()));
    } else {
      write_file(path, json({{"strategy", kind}, {"level", baseline_level}}).dump(2) + "\n");
    }
  }

  static Run load(const fs::path& dir) {
    const json m = json::parse(read_file(dir / "run.json"));
    if (m.value("format", "") != "genlevel-run") {
      throw CommandError((dir / "run.json").string() + " is not a genlevel run manifest");
    }
    Run run;
    run.model = m.at("model").get<std::string>();
    run.kind = m.at("kind").get<std::string>();
    run.c = m.at("c").get<int>();
    run.seed = m.at("seed").get<std::uint64_t>();
    run.pad = m.at("pad_token").get<std::string>();
    const fs::path model_path = dir / m.at("model_file").get<std::string>();
    if (run.model == "context") {
      run.encoder = EncoderOptions::from_json(m.at("encoder"));
      gl_context_model* cm = nullptr;
      check(gl_context_load(model_path.string().c_str(), run.pad.c_str(), &cm));
      run.context.reset(cm);
    } else if (run.model == "features") {
      gl_feature_model* fm = nullptr;
      check(gl_feature_load(model_path.string().c_str(), &fm));
      run.features.reset(fm);
    } else if (run.model == "baseline") {
      run.baseline_level = json::parse(read_file(model_path)).at("level").get<int>();
    } else {
      throw CommandError("unknown model type in run manifest: " + run.model);
    }
    return run;
  }

  // Predicted levels for `ds`, whose records must all have at most C
  // candidates.
  std::vector<int> predict(const gl_dataset* ds, const gl_provider* provider,
                           std::string* details = nullptr) const {
    std::vector<int> levels(gl_dataset_size(ds));
    if (model == "context") {
      char* d = nullptr;
      check(gl_context_predict(context.get(), ds, provider, levels.data(),
                               details != nullptr ? &d : nullptr));
      if (details != nullptr) *details = take(d);
    } else if (model == "features") {
      check(gl_feature_predict(features.get(), ds, levels.data()));
    } else {
      for (std::size_t i = 0; i < levels.size(); ++i) {
        levels[i] = std::min(baseline_level, num_candidates(ds, i));
      }
    }
    return levels;
  }
};

void train_baseline(Run& run, const gl_dataset* train) {
  run.model = "baseline";
  const gl_baseline strategy = run.kind == "first-candidate" ? GL_BASELINE_FIRST_CANDIDATE
                                                             : GL_BASELINE_MOST_FREQUENT_LEVEL;
  std::vector<int> scratch(gl_dataset_size(train));
  check(gl_baseline_predict(train, train, strategy, scratch.data(), &run.baseline_level));
}

// Evaluates `run` on `eval_path` (filtered to C) into `dir`.
void evaluate_into(const StagedDir& dir, const Run& run, const gl_provider* provider,
                   const std::string& eval_path, gl_split split) {
  auto all = load_dataset(eval_path, split);
  auto kept = filter_dataset(all.get(), run.c);
  std::string details;
  const auto levels = run.predict(kept.get(), provider, run.model == "context" ? &details : nullptr);
  auto ev = evaluate(kept.get(), levels, run.c);
  write_metrics(dir, ev.get(), split == GL_SPLIT_TEST ? "test" : "train",
                gl_dataset_size(all.get()), gl_dataset_size(kept.get()));
  if (run.model == "context") dir.write("predictions.jsonl", details);
}

// Written under the subcommand's section so the file replays with --config.
// Unset options are left out; an empty value would not pass validation.
std::string config_ini(const CLI::App& app) {
  std::istringstream in(app.config_to_str(true, false));
  std::string out = "[" + app.get_name() + "]\n";
  for (std::string line; std::getline(in, line);) {
    if (line.size() < 3 || line.compare(line.size() - 3, 3, "=\"\"") != 0) out += line + "\n";
  }
  return out;
}

// ---- subcommands ----------------------------------------------------------

std::size_t g_threads = 0;

// Registers the subcommand body; options, config and environment are fully
// resolved by the time it runs.
void on_run(CLI::App* cmd, std::function<void()> body) {
  cmd->callback([body = std::move(body)] {
    gl_set_threads(g_threads);
    body();
  });
}

std::vector<int> default_c_values() { return {2, 5, 6, 7}; }

void add_stats(CLI::App& app) {
  struct Opts {
    std::string train, test, out;
    std::vector<int> c_values = default_c_values();
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("stats", "Dataset sizes, candidate histograms and coverage");
  cmd->add_option("--train", o->train, "Training split (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--test", o->test, "Test split (JSONL)")->check(CLI::ExistingFile);
  cmd->add_option("--c-values", o->c_values, "Candidate caps for coverage")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--out", o->out, "Write the JSON report here instead of stdout");
  on_run(cmd, [o] {
    json report = json::object();
    std::string summary;
    auto describe = [&](const std::string& name, const std::string& path, gl_split split) {
      auto ds = load_dataset(path, split);
      char* js = nullptr;
      check(gl_dataset_stats_json(ds.get(), o->c_values.data(), o->c_values.size(), &js));
      report[name] = json::parse(take(js));
      summary += name + ": " + std::to_string(gl_dataset_size(ds.get())) + " records\n";
    };
    describe("train", o->train, GL_SPLIT_TRAIN);
    if (!o->test.empty()) describe("test", o->test, GL_SPLIT_TEST);
    if (o->out.empty()) {
      std::cout << summary << report.dump(2) << "\n";
    } else {
      StagedFile(o->out).emit(report.dump(2) + "\n");
      std::cout << summary;
    }
  });
}

void add_dump_contextual(CLI::App& app) {
  struct Opts {
    std::string data, out, pad = "[PAD]";
    int c = 7;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("dump-contextual", "Write padded contextual inputs as JSONL");
  cmd->add_option("--data", o->data, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--c", o->c, "Maximum candidates")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--pad", o->pad, "Pad token")->capture_default_str();
  cmd->add_option("--out", o->out, "Output file (default stdout)");
  on_run(cmd, [o] {
    auto all = load_dataset(o->data, GL_SPLIT_TRAIN);
    auto kept = filter_dataset(all.get(), o->c);
    char* jsonl = nullptr;
    check(gl_dataset_contextual_jsonl(kept.get(), o->c, o->pad.c_str(), &jsonl));
    StagedFile(o->out).emit(take(jsonl));
    std::cerr << "dumped " << gl_dataset_size(kept.get()) << " of " << gl_dataset_size(all.get())
              << " records\n";
  });
}

void add_train_context(CLI::App& app) {
  struct Opts {
    std::string train, test, out;
    int c = 7;
    std::uint64_t seed = 0;
    EncoderOptions encoder;
    ContextOptions model;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("train-context", "Train the context-aware model");
  cmd->add_option("--train", o->train, "Training split (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--test", o->test, "Evaluation split (default: the training split)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o->out, "Run directory")->required();
  cmd->add_option("--c", o->c, "Maximum candidates")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", o->seed)->capture_default_str();
  o->encoder.add(cmd);
  o->model.add(cmd);
  on_run(cmd, [o, cmd] {
    StagedDir dir(o->out);
    dir.write("config.ini", config_ini(*cmd));
    auto provider = o->encoder.open();
    auto all = load_dataset(o->train, GL_SPLIT_TRAIN);
    auto train = filter_dataset(all.get(), o->c);
    const auto cfg = o->model.config(provider.get(), o->c, o->seed);

    Run run;
    run.model = "context";
    run.kind = "context";
    run.c = o->c;
    run.seed = o->seed;
    run.pad = o->model.pad;
    run.encoder = o->encoder;
    gl_context_model* cm = nullptr;
    char* log = nullptr;
    check(gl_context_train(train.get(), provider.get(), &cfg, &cm, &log));
    run.context.reset(cm);
    dir.write("training_log.json", take(log) + "\n");
    run.save_model(dir / "model.json");
    dir.write("run.json", run.manifest(o->train, o->test).dump(2) + "\n");
    if (o->test.empty()) {
      evaluate_into(dir, run, provider.get(), o->train, GL_SPLIT_TRAIN);
    } else {
      evaluate_into(dir, run, provider.get(), o->test, GL_SPLIT_TEST);
    }
    dir.commit();
    std::cout << "trained on " << gl_dataset_size(train.get()) << " records; wrote " << o->out
              << "\n";
  });
}

void add_train_features(CLI::App& app) {
  struct Opts {
    std::string train, test, out;
    int c = 7;
    std::uint64_t seed = 0;
    FeatureOptions model;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("train-features", "Train a feature-based model or baseline");
  cmd->add_option("--train", o->train, "Training split (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--test", o->test, "Evaluation split (default: the training split)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o->out, "Run directory")->required();
  cmd->add_option("--c", o->c, "Maximum candidates")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", o->seed)->capture_default_str();
  o->model.add(cmd, true);
  on_run(cmd, [o, cmd] {
    StagedDir dir(o->out);
    dir.write("config.ini", config_ini(*cmd));
    auto all = load_dataset(o->train, GL_SPLIT_TRAIN);
    auto train = filter_dataset(all.get(), o->c);

    Run run;
    run.kind = o->model.model;
    run.c = o->c;
    run.seed = o->seed;
    if (o->model.is_baseline()) {
      train_baseline(run, train.get());
    } else {
      run.model = "features";
      const auto cfg = o->model.config(o->seed);
      gl_feature_model* fm = nullptr;
      check(gl_feature_train(train.get(), &cfg, &fm));
      run.features.reset(fm);
    }
    run.save_model(dir / "model.json");
    dir.write("run.json", run.manifest(o->train, o->test).dump(2) + "\n");
    if (o->test.empty()) {
      evaluate_into(dir, run, nullptr, o->train, GL_SPLIT_TRAIN);
    } else {
      evaluate_into(dir, run, nullptr, o->test, GL_SPLIT_TEST);
    }
    dir.commit();
    std::cout << "trained " << run.kind << " on " << gl_dataset_size(train.get())
              << " records; wrote " << o->out << "\n";
  });
}

void add_evaluate(CLI::App& app) {
  struct Opts {
    std::string run_dir, test, store, out;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("evaluate", "Evaluate a trained run directory");
  cmd->add_option("--run-dir", o->run_dir, "Run directory from a train-* command")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--test", o->test, "Evaluation split (default: the run's recorded split)");
  cmd->add_option("--store", o->store, "Embedding store override for store-encoded runs");
  cmd->add_option("--out", o->out, "Output directory (default: <run-dir>/evaluation)");
  on_run(cmd, [o, cmd] {
    Run run = Run::load(o->run_dir);
    const json manifest = json::parse(read_file(fs::path(o->run_dir) / "run.json"));
    std::string path = o->test;
    gl_split split = GL_SPLIT_TEST;
    if (path.empty()) {
      path = manifest.at("test").get<std::string>();
      if (path.empty()) {
        path = manifest.at("train").get<std::string>();
        split = GL_SPLIT_TRAIN;
      }
    }
    if (!o->store.empty()) run.encoder.store = o->store;
    const fs::path out = o->out.empty() ? fs::path(o->run_dir) / "evaluation" : fs::path(o->out);
    StagedDir dir(out);
    dir.write("config.ini", config_ini(*cmd));
    Provider provider;
    if (run.model == "context") provider = run.encoder.open();
    evaluate_into(dir, run, provider.get(), path, split);
    dir.commit();
    std::cout << "wrote " << out.string() << "\n";
  });
}

void add_predict(CLI::App& app) {
  struct Opts {
    std::string run_dir, data, store, out;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("predict", "Predict levels and emit generalized text");
  cmd->add_option("--run-dir", o->run_dir, "Run directory from a train-* command")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--data", o->data, "Records to generalize (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--store", o->store, "Embedding store override for store-encoded runs");
  cmd->add_option("--out", o->out, "Output JSONL (default stdout)");
  on_run(cmd, [o] {
    Run run = Run::load(o->run_dir);
    if (!o->store.empty()) run.encoder.store = o->store;
    auto all = load_dataset(o->data, GL_SPLIT_TEST);
    auto kept = filter_dataset(all.get(), run.c);
    Provider provider;
    if (run.model == "context") provider = run.encoder.open();
    const auto levels = run.predict(kept.get(), provider.get());
    std::string out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const char* id = nullptr;
      const char* candidate = nullptr;
      char* text = nullptr;
      check(gl_dataset_record_id(kept.get(), i, &id));
      check(gl_dataset_candidate(kept.get(), i, levels[i], &candidate));
      check(gl_generalize_text(kept.get(), i, levels[i], &text));
      json row = {{"id", id},
                  {"predicted_level", levels[i]},
                  {"candidate", candidate},
                  {"generalized_text", take(text)}};
      out += row.dump() + "\n";
    }
    StagedFile(o->out).emit(out);
    const std::size_t skipped = gl_dataset_size(all.get()) - gl_dataset_size(kept.get());
    if (skipped > 0) {
      std::cerr << "skipped " << skipped << " records with more than " << run.c << " candidates\n";
    }
  });
}

void add_sweep_c(CLI::App& app) {
  struct Opts {
    std::string train, test, out;
    std::vector<int> c_values = default_c_values();
    std::vector<std::string> methods = {"baseline", "features", "context"};
    std::uint64_t seed = 0;
    EncoderOptions encoder;
    ContextOptions context;
    FeatureOptions features;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("sweep-c", "Train and evaluate every method for each C");
  cmd->add_option("--train", o->train, "Training split (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--test", o->test, "Test split (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->add_option("--c-values", o->c_values, "Candidate caps")->delimiter(',')->capture_default_str();
  cmd->add_option("--methods", o->methods, "Subset of baseline, features, context")
      ->delimiter(',')
      ->check(CLI::IsMember({"baseline", "features", "context"}))
      ->capture_default_str();
  cmd->add_option("--seed", o->seed)->capture_default_str();
  o->encoder.add(cmd);
  o->context.add(cmd);
  o->features.add(cmd, false);
  on_run(cmd, [o, cmd] {
    for (int c : o->c_values) {
      if (c < 1) throw CommandError("--c-values entries must be positive");
    }
    StagedDir dir(o->out);
    dir.write("config.ini", config_ini(*cmd));
    auto train_all = load_dataset(o->train, GL_SPLIT_TRAIN);
    auto test_all = load_dataset(o->test, GL_SPLIT_TEST);
    Provider provider;
    for (const auto& m : o->methods) {
      if (m == "context") provider = o->encoder.open();
    }

    json summary = {{"train", o->train}, {"test", o->test}, {"seed", o->seed}, {"rows", json::array()}};
    struct Row {
      int c;
      double coverage;
      std::size_t n_train, n_test;
      std::vector<Scored> scores;
    };
    std::vector<Row> rows;
    for (int c : o->c_values) {
      auto train = filter_dataset(train_all.get(), c);
      auto test = filter_dataset(test_all.get(), c);
      Row row{c,
              gl_dataset_size(test_all.get()) == 0
                  ? 0.0
                  : 100.0 * static_cast<double>(gl_dataset_size(test.get())) /
                        static_cast<double>(gl_dataset_size(test_all.get())),
              gl_dataset_size(train.get()), gl_dataset_size(test.get()), {}};
      json jrow = {{"c", c},
                   {"dataset_percent", row.coverage},
                   {"train_records", row.n_train},
                   {"test_records", row.n_test},
                   {"methods", json::object()}};
      for (const auto& method : o->methods) {
        Run run;
        run.c = c;
        run.seed = o->seed;
        if (method == "baseline") {
          run.kind = "most-frequent";
          train_baseline(run, train.get());
        } else if (method == "features") {
          run.model = "features";
          run.kind = o->features.model;
          const auto cfg = o->features.config(o->seed);
          gl_feature_model* fm = nullptr;
          check(gl_feature_train(train.get(), &cfg, &fm));
          run.features.reset(fm);
        } else {
          run.model = "context";
          const auto cfg = o->context.config(provider.get(), c, o->seed);
          gl_context_model* cm = nullptr;
          check(gl_context_train(train.get(), provider.get(), &cfg, &cm, nullptr));
          run.context.reset(cm);
        }
        const auto levels = run.predict(test.get(), provider.get());
        auto ev = evaluate(test.get(), levels, c);
        const std::string stem = "c" + std::to_string(c) + "_" + method;
        dir.write("confusion_" + stem + "_counts.csv", report(ev.get(), GL_REPORT_CONFUSION_COUNTS_CSV));
        dir.write("confusion_" + stem + "_normalized.csv",
                  report(ev.get(), GL_REPORT_CONFUSION_NORMALIZED_CSV));
        jrow["methods"][method] = json::parse(report(ev.get(), GL_REPORT_JSON));
        row.scores.push_back(scored(ev.get()));
        std::cerr << "C=" << c << " " << method << ": majority vote "
                  << fixed(100.0 * row.scores.back().majority, 2) << "%\n";
      }
      summary["rows"].push_back(jrow);
      rows.push_back(std::move(row));
    }
    dir.write("summary.json", summary.dump(2) + "\n");

    // Accuracy table: one row per C, majority-vote and all-selections
    // accuracy per method.
    std::string acc = pad_right("C", 4) + pad_left("data %", 9) + pad_left("train", 8) +
                      pad_left("test", 8);
    for (const auto& m : o->methods) acc += pad_left(m + " MV", 14) + pad_left(m + " AS", 14);
    acc += "\n";
    std::string csv = "c,dataset_percent,train_records,test_records";
    for (const auto& m : o->methods) csv += "," + m + "_majority_vote," + m + "_all_selections";
    csv += "\n";
    for (const auto& r : rows) {
      acc += pad_right(std::to_string(r.c), 4) + pad_left(fixed(r.coverage, 2), 9) +
             pad_left(std::to_string(r.n_train), 8) + pad_left(std::to_string(r.n_test), 8);
      csv += std::to_string(r.c) + "," + fixed(r.coverage, 2) + "," + std::to_string(r.n_train) +
             "," + std::to_string(r.n_test);
      for (const auto& s : r.scores) {
        acc += pad_left(fixed(100.0 * s.majority, 2), 14) + pad_left(fixed(100.0 * s.all, 2), 14);
        csv += "," + fixed(100.0 * s.majority, 4) + "," + fixed(100.0 * s.all, 4);
      }
      acc += "\n";
      csv += "\n";
    }
    dir.write("accuracy.txt", acc);
    dir.write("accuracy.csv", csv);

    // Weighted precision/recall/F1 per method and C, both weightings.
    std::string wt = pad_right("C", 4) + pad_right("method", 10) + pad_right("weighting", 11) +
                     pad_left("precision", 11) + pad_left("recall", 9) + pad_left("F1", 9) + "\n";
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < o->methods.size(); ++k) {
        const auto& s = r.scores[k];
        for (int lit = 0; lit < 2; ++lit) {
          const double* v = lit ? s.literal : s.support;
          wt += pad_right(std::to_string(r.c), 4) + pad_right(o->methods[k], 10) +
                pad_right(lit ? "literal" : "support", 11) + pad_left(fixed(v[0], 4), 11) +
                pad_left(fixed(v[1], 4), 9) + pad_left(fixed(v[2], 4), 9) + "\n";
        }
      }
    }
    dir.write("weighted.txt", wt);
    dir.commit();
    std::cout << acc;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"genlevel: predict PII generalization levels"};
  app.set_config("--config", "", "INI configuration file; command-line flags take precedence");
  app.require_subcommand(1);
  app.add_option("--threads", g_threads, "Worker threads (0 = all cores)")
      ->envname("GENLEVEL_THREADS")
      ->check(CLI::NonNegativeNumber);

  add_stats(app);
  add_dump_contextual(app);
  add_train_context(app);
  add_train_features(app);
  add_evaluate(app);
  add_predict(app);
  add_sweep_c(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
