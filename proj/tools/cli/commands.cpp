#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mseol/errors.hpp"
#include "mseol/features.hpp"
#include "mseol/losses.hpp"
#include "mseol/metrics.hpp"
#include "mseol/network.hpp"
#include "mseol/rng.hpp"
#include "mseol/train.hpp"

namespace mseol::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kSplitNames[] = {"train", "val", "test"};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void prepare_out(const ExperimentConfig& config, const char* command) {
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw std::runtime_error("cannot create " + config.out.string() + ": " + ec.message());
  auto out = open_out(config.out / (std::string("config-") + command + ".txt"));
  config.write(out);
}

void write_json(const fs::path& path, const ordered_json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

fs::path split_path(const ExperimentConfig& config, const std::string& split) {
  return config.effective_data_dir() / (split + ".csv");
}

LabeledDataset load_split(const ExperimentConfig& config, const std::string& split) {
  const auto path = split_path(config, split);
  if (!fs::exists(path)) throw std::runtime_error("missing dataset file " + path.string());
  return load_csv(path, config.classes);
}

MlpModel load_model(const ExperimentConfig& config) {
  const auto path = config.effective_checkpoint();
  if (!fs::exists(path)) throw std::runtime_error("missing checkpoint " + path.string());
  auto model = load_checkpoint(path);
  if (model.output_width() != static_cast<std::size_t>(config.classes)) {
    throw InvalidArgument("checkpoint " + path.string() + " has " +
                          std::to_string(model.output_width()) + " outputs, config has " +
                          std::to_string(config.classes) + " classes");
  }
  return model;
}

ordered_json report_json(const EvalReport& r) {
  ordered_json j;
  j["accuracy"] = r.accuracy;
  j["macro_f"] = r.macro_f;
  j["miou"] = r.miou;
  auto classes = ordered_json::array();
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    const auto& c = r.per_class[k];
    classes.push_back({{"class", k},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"iou", c.iou}});
  }
  j["per_class"] = std::move(classes);
  return j;
}

ordered_json epoch_json(const EpochRecord& e) {
  return {{"epoch", e.epoch},
          {"lr", e.lr},
          {"train_loss", e.train_loss},
          {"val_accuracy", e.val_accuracy},
          {"val_macro_f", e.val_macro_f},
          {"val_miou", e.val_miou}};
}

ordered_json loss_json(const Loss& loss) {
  ordered_json j;
  j["kind"] = std::string(to_string(loss.kind()));
  if (!loss.class_weights().empty()) j["class_weights"] = loss.class_weights();
  if (const auto& table = loss.table()) {
    j["alpha"] = table->alpha();
    std::vector<double> magnitudes;
    for (int k = 0; k < table->num_classes(); ++k) magnitudes.push_back(table->magnitude(k));
    j["target_magnitudes"] = magnitudes;
  }
  return j;
}

void check_batch(const ExperimentConfig& config, const LabeledDataset& train) {
  if (config.batch_size > train.size()) {
    throw ConfigError("'batch_size' " + std::to_string(config.batch_size) +
                      " exceeds the train split size " + std::to_string(train.size()));
  }
}

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Population standard deviation, so a single seed reports 0.
Stat mean_std(const std::vector<double>& values) {
  Stat s;
  for (const double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  for (const double v : values) s.stddev += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(s.stddev / static_cast<double>(values.size()));
  return s;
}

}  // namespace

Splits generate_splits(const ExperimentConfig& config) {
  const auto seed = config.effective_data_seed();
  const auto k = static_cast<std::size_t>(config.classes);
  const auto train_counts = config.planned_train_counts();
  const std::vector<std::size_t> val_counts(k, config.val_per_class);
  const std::vector<std::size_t> test_counts(k, config.test_per_class);
  return {sample_gaussian_mixture(config.mixture(seed), train_counts),
          sample_gaussian_mixture(config.mixture(mix64(seed ^ 0x76616cULL)), val_counts),
          sample_gaussian_mixture(config.mixture(mix64(seed ^ 0x74657374ULL)), test_counts)};
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

void cmd_generate(const ExperimentConfig& config) {
  config.validate(Command::Generate);
  prepare_out(config, "generate");
  const auto splits = generate_splits(config);
  const LabeledDataset* sets[] = {&splits.train, &splits.val, &splits.test};

  ordered_json manifest;
  manifest["data_seed"] = config.effective_data_seed();
  manifest["classes"] = config.classes;
  manifest["dim"] = config.dim;
  ordered_json files;
  for (int s = 0; s < 3; ++s) {
    const auto path = config.out / (std::string(kSplitNames[s]) + ".csv");
    save_csv(*sets[s], path);
    files[kSplitNames[s]] = {{"file", path.filename().string()},
                             {"rows", sets[s]->size()},
                             {"counts", sets[s]->class_counts()},
                             {"fnv1a64", file_hash(path)}};
  }
  manifest["splits"] = std::move(files);
  manifest["created_at"] = utc_timestamp();
  write_json(config.out / "manifest.json", manifest);
}

void cmd_train(const ExperimentConfig& config) {
  config.validate(Command::Train);
  const auto train = load_split(config, "train");
  const auto val = load_split(config, "val");
  const auto test = load_split(config, "test");
  check_batch(config, train);
  prepare_out(config, "train");

  const auto tc = config.train_config();
  const auto loss = Loss::from_counts(tc.loss, train.class_counts(), tc.alpha, tc.focal_gamma);
  const auto result = train_model(train, val, loss, tc);
  const auto cm = confusion_for(result.model, test);

  {
    auto out = open_out(config.out / "epochs.jsonl");
    for (const auto& e : result.records) out << epoch_json(e).dump() << '\n';
  }
  ordered_json rep;
  rep["loss"] = loss_json(loss);
  rep["seed"] = tc.seed;
  rep["epochs"] = tc.epoch_max;
  rep["final_train_loss"] = result.records.back().train_loss;
  rep["test"] = report_json(report(cm));
  write_json(config.out / "report.json", rep);
  {
    auto out = open_out(config.out / "confusion.csv");
    cm.write_csv(out);
  }
  const auto ckpt = config.out / "model.ckpt";
  save_checkpoint(result.model, ckpt);

  ordered_json manifest;
  ordered_json hashes;
  for (const char* split : kSplitNames) hashes[split] = file_hash(split_path(config, split));
  manifest["dataset_fnv1a64"] = std::move(hashes);
  manifest["checkpoint_fnv1a64"] = file_hash(ckpt);
  manifest["created_at"] = utc_timestamp();
  manifest["wall_seconds"] = result.wall_seconds;
  write_json(config.out / "train_manifest.json", manifest);
}

void cmd_evaluate(const ExperimentConfig& config) {
  config.validate(Command::Evaluate);
  const auto model = load_model(config);
  const auto data = load_split(config, config.split);
  prepare_out(config, "evaluate");
  const auto cm = confusion_for(model, data);
  ordered_json rep = report_json(report(cm));
  rep["split"] = config.split;
  write_json(config.out / "eval_report.json", rep);
  auto out = open_out(config.out / "eval_confusion.csv");
  cm.write_csv(out);
}

void cmd_sweep_alpha(const ExperimentConfig& config) {
  config.validate(Command::SweepAlpha);
  const auto train = load_split(config, "train");
  const auto val = load_split(config, "val");
  const auto test = load_split(config, "test");
  check_batch(config, train);
  prepare_out(config, "sweep-alpha");

  const auto seeds = config.effective_seeds();
  std::vector<AlphaSelection> runs(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  unsigned workers = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(seeds.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < seeds.size(); i += workers) {
          try {
            auto tc = config.train_config();
            tc.seed = seeds[i];
            runs[i] = select_alpha(train, val, config.alpha_candidates, tc, config.select_metric);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const bool by_miou = config.select_metric == SelectionMetric::MeanIoU;
  std::ostringstream tsv;
  tsv << "alpha\tval_macro_f_mean\tval_macro_f_std\tval_miou_mean\tval_miou_std\n";
  ordered_json rows = ordered_json::array();
  double best_alpha = config.alpha_candidates.front();
  double best_score = -1.0;
  for (std::size_t a = 0; a < config.alpha_candidates.size(); ++a) {
    std::vector<double> f, iou;
    for (const auto& run : runs) {
      f.push_back(run.table[a].val_macro_f);
      iou.push_back(run.table[a].val_miou);
    }
    const auto fs_ = mean_std(f);
    const auto is = mean_std(iou);
    const double alpha = config.alpha_candidates[a];
    const double score = by_miou ? is.mean : fs_.mean;
    if (score > best_score) {
      best_score = score;
      best_alpha = alpha;
    }
    tsv << ordered_json(alpha).dump() << '\t' << ordered_json(fs_.mean).dump() << '\t'
        << ordered_json(fs_.stddev).dump() << '\t' << ordered_json(is.mean).dump() << '\t'
        << ordered_json(is.stddev).dump() << '\n';
    rows.push_back({{"alpha", alpha},
                    {"val_macro_f", {{"mean", fs_.mean}, {"std", fs_.stddev}}},
                    {"val_miou", {{"mean", is.mean}, {"std", is.stddev}}}});
  }
  {
    auto out = open_out(config.out / "sweep.tsv");
    out << tsv.str();
  }
  ordered_json per_seed = ordered_json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    per_seed.push_back({{"seed", seeds[i]},
                        {"best_alpha", runs[i].best_alpha},
                        {"test", report_json(evaluate(runs[i].best_run.model, test))}});
  }
  ordered_json doc;
  doc["select_metric"] = by_miou ? "miou" : "macro-f";
  doc["seeds"] = seeds;
  doc["table"] = std::move(rows);
  doc["best_alpha"] = best_alpha;
  doc["per_seed"] = std::move(per_seed);
  write_json(config.out / "sweep.json", doc);
}

void cmd_dump_features(const ExperimentConfig& config) {
  config.validate(Command::DumpFeatures);
  const auto model = load_model(config);
  const auto data = load_split(config, config.split);
  prepare_out(config, "dump-features");
  const auto dump = dump_features(model, data, config.split);
  {
    auto out = open_out(config.out / "features.csv");
    write_features_csv(dump, out);
  }
  auto out = open_out(config.out / "logits.csv");
  write_logits_csv(dump, out);
}

}  // namespace mseol::cli
