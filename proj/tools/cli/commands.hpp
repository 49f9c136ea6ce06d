#ifndef MSEOL_CLI_COMMANDS_HPP_
#define MSEOL_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "cli/config.hpp"
#include "mseol/data.hpp"

namespace mseol::cli {

struct Splits {
  LabeledDataset train;
  LabeledDataset val;
  LabeledDataset test;
};

/// Draws the three splits from the configured mixture. Train carries the
/// imbalance; val and test are balanced. Each split has its own stream.
Splits generate_splits(const ExperimentConfig& config);

/// 64-bit FNV-1a of a file's bytes, as 16 lowercase hex digits.
std::string file_hash(const std::filesystem::path& path);

// Each command validates `config`, then writes into config.out. ConfigError
// signals a usage problem; any other exception is a runtime failure.
void cmd_generate(const ExperimentConfig& config);
void cmd_train(const ExperimentConfig& config);
void cmd_evaluate(const ExperimentConfig& config);
void cmd_sweep_alpha(const ExperimentConfig& config);
void cmd_dump_features(const ExperimentConfig& config);

}  // namespace mseol::cli

#endif  // MSEOL_CLI_COMMANDS_HPP_
