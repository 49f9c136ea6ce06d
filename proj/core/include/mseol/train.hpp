#ifndef MSEOL_TRAIN_HPP_
#define MSEOL_TRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mseol/data.hpp"
#include "mseol/losses.hpp"
#include "mseol/metrics.hpp"
#include "mseol/network.hpp"

namespace mseol {

enum class ScheduleKind { Poly, Constant };

std::string_view to_string(ScheduleKind kind);
std::optional<ScheduleKind> parse_schedule_kind(std::string_view text);

/// lr_base * (1 - epoch / epoch_max)^0.9 for 0 <= epoch <= epoch_max.
double poly_lr(double lr_base, int epoch, int epoch_max);

struct TrainConfig {
  LossKind loss = LossKind::CrossEntropy;
  double alpha = 1.0;          ///< outlying-label scale, mse-ol only
  double focal_gamma = 2.0;
  double lr_base = 0.05;
  int epoch_max = 200;
  std::size_t batch_size = 64;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::uint64_t seed = 1;
  ScheduleKind schedule = ScheduleKind::Poly;
  /// Widths between input and output; the last one is the penultimate layer.
  std::vector<std::size_t> hidden = {16, 2};

  void validate() const;
  /// Learning rate used during `epoch` (0-based).
  double lr_at(int epoch) const;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  double val_macro_f = 0.0;
  double val_miou = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochRecord> records;
  double wall_seconds = 0.0;
};

/// Model predictions for every row, then the confusion matrix over them.
ConfusionMatrix confusion_for(const MlpModel& model, const LabeledDataset& dataset);
EvalReport evaluate(const MlpModel& model, const LabeledDataset& dataset);

/// Row order used before shuffling: indices sorted by (label, features), so
/// a permuted copy of a dataset trains identically.
std::vector<std::size_t> canonical_order(const LabeledDataset& dataset);

/// Mini-batch SGD with momentum; L2 weight decay is folded into the gradient:
///   g += weight_decay * w;  v = momentum * v + g;  w -= lr * v.
/// Batches are drawn from a fresh Fisher-Yates shuffle of the canonical order
/// every epoch; the learning rate changes once per epoch. Validation metrics
/// are computed after each epoch.
TrainResult train_model(const LabeledDataset& train, const LabeledDataset& val,
                        const Loss& loss, const TrainConfig& config);

/// Same, with the loss built from the training set's class counts.
TrainResult train_model(const LabeledDataset& train, const LabeledDataset& val,
                        const TrainConfig& config);

/// Same, starting from the given parameters instead of a seeded init.
TrainResult train_model(MlpModel model, const LabeledDataset& train, const LabeledDataset& val,
                        const Loss& loss, const TrainConfig& config);

enum class SelectionMetric { MacroF, MeanIoU };

struct AlphaRow {
  double alpha = 0.0;
  double val_macro_f = 0.0;
  double val_miou = 0.0;
  double val_accuracy = 0.0;
};

struct AlphaSelection {
  double best_alpha = 0.0;
  std::vector<AlphaRow> table;
  TrainResult best_run;
};

/// Trains one mse-ol model per candidate with the same seed and keeps the one
/// with the best final validation metric; ties go to the smaller alpha.
AlphaSelection select_alpha(const LabeledDataset& train, const LabeledDataset& val,
                            std::span<const double> candidates, const TrainConfig& config,
                            SelectionMetric metric = SelectionMetric::MacroF);

}  // namespace mseol

#endif  // MSEOL_TRAIN_HPP_
