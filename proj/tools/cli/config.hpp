#ifndef MSEOL_CLI_CONFIG_HPP_
#define MSEOL_CLI_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mseol/data.hpp"
#include "mseol/train.hpp"

namespace mseol::cli {

/// Bad or inconsistent configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Generate, Train, Evaluate, SweepAlpha, DumpFeatures };

/// Everything a command needs. Parsed from a flat "key = value" file, then
/// overridden by flags. See docs/config.md for the schema.
struct ExperimentConfig {
  // Gaussian-mixture generator.
  int classes = 3;
  std::size_t dim = 2;
  std::vector<std::vector<double>> means;  ///< empty: evenly spaced on a circle
  double mean_radius = 1.0;
  double stddev = 0.6;
  std::optional<std::uint64_t> data_seed;  ///< defaults to `seed`

  // Imbalance of the train split.
  ImbalanceKind imbalance = ImbalanceKind::LongTailed;
  double ratio = 10.0;
  std::size_t n_max = 1000;
  std::vector<std::size_t> train_counts;  ///< explicit counts override ratio/n_max

  std::size_t val_per_class = 100;
  std::size_t test_per_class = 500;

  // Training.
  LossKind loss = LossKind::CrossEntropy;
  std::optional<double> alpha;
  double focal_gamma = 2.0;
  double lr_base = 0.05;
  int epochs = 200;
  std::size_t batch_size = 64;
  double momentum = 0.9;
  double weight_decay = 0.0;
  ScheduleKind schedule = ScheduleKind::Poly;
  std::vector<std::size_t> hidden = {16, 2};
  std::uint64_t seed = 1;

  // Sweeps.
  std::vector<std::uint64_t> seeds;  ///< empty: {seed}
  std::vector<double> alpha_candidates = {1, 2, 3, 4, 5, 6, 7, 8};
  SelectionMetric select_metric = SelectionMetric::MacroF;
  unsigned threads = 0;  ///< 0: one per hardware thread

  // Paths.
  std::filesystem::path out = "out";
  std::optional<std::filesystem::path> data_dir;    ///< defaults to `out`
  std::optional<std::filesystem::path> checkpoint;  ///< defaults to out/model.ckpt
  std::string split = "test";

  /// Applies one "key = value" setting; throws ConfigError on unknown keys or
  /// unparsable values.
  void set(const std::string& key, const std::string& value);

  /// Rules that do not depend on data on disk.
  void validate(Command command) const;

  std::uint64_t effective_data_seed() const { return data_seed.value_or(seed); }
  std::filesystem::path effective_data_dir() const { return data_dir.value_or(out); }
  std::filesystem::path effective_checkpoint() const {
    return checkpoint.value_or(out / "model.ckpt");
  }
  std::vector<std::uint64_t> effective_seeds() const {
    return seeds.empty() ? std::vector<std::uint64_t>{seed} : seeds;
  }

  /// Train-split counts implied by the generator settings.
  std::vector<std::size_t> planned_train_counts() const;
  GaussianMixtureSpec mixture(std::uint64_t stream_seed) const;
  TrainConfig train_config() const;

  /// Every key in schema order, one "key = value" per line.
  void write(std::ostream& out) const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
/// Parses file contents; `origin` names the source in error messages.
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "config");

}  // namespace mseol::cli

#endif  // MSEOL_CLI_CONFIG_HPP_
