#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace {

using mseol::cli::Command;
using mseol::cli::ConfigError;
using mseol::cli::ExperimentConfig;

struct Flags {
  std::string config;
  std::optional<std::string> seed, loss, alpha, out, checkpoint, split, data_dir;
  std::vector<std::string> sets;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "config file (key = value per line)");
  sub->add_option("--seed", f.seed, "training seed");
  sub->add_option("--loss", f.loss, "ce, wce, focal, mse or mse-ol");
  sub->add_option("--alpha", f.alpha, "outlying-label scale for mse-ol");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--checkpoint", f.checkpoint, "model checkpoint to read");
  sub->add_option("--split", f.split, "train, val or test");
  sub->add_option("--data-dir", f.data_dir, "directory holding train/val/test.csv");
  sub->add_option("--set", f.sets, "override any config key, as key=value")->take_all();
}

ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig config = f.config.empty() ? ExperimentConfig{} : mseol::cli::load_config(f.config);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const std::pair<const char*, const std::optional<std::string>*> direct[] = {
      {"seed", &f.seed},   {"loss", &f.loss},   {"alpha", &f.alpha},        {"out", &f.out},
      {"checkpoint", &f.checkpoint}, {"split", &f.split}, {"data_dir", &f.data_dir}};
  for (const auto& [key, value] : direct) {
    if (*value) config.set(key, **value);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imbalanced classification experiments with outlying-label MSE"};
  app.require_subcommand(1);
  Flags flags;
  struct Sub {
    const char* name;
    const char* help;
    void (*run)(const ExperimentConfig&);
  };
  const Sub subs[] = {
      {"generate", "sample train/val/test splits", mseol::cli::cmd_generate},
      {"train", "train one model and report on the test split", mseol::cli::cmd_train},
      {"evaluate", "score a checkpoint on a split", mseol::cli::cmd_evaluate},
      {"sweep-alpha", "select alpha on validation across seeds", mseol::cli::cmd_sweep_alpha},
      {"dump-features", "export penultimate activations and logits", mseol::cli::cmd_dump_features},
  };
  for (const auto& s : subs) add_flags(app.add_subcommand(s.name, s.help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (const auto& s : subs) {
    if (!app.got_subcommand(s.name)) continue;
    try {
      s.run(build_config(flags));
      return 0;
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return 1;
}
