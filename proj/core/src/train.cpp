#include "mseol/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "mseol/errors.hpp"
#include "mseol/rng.hpp"

namespace mseol {

std::string_view to_string(ScheduleKind kind) {
  return kind == ScheduleKind::Poly ? "poly" : "constant";
}

std::optional<ScheduleKind> parse_schedule_kind(std::string_view text) {
  if (text == "poly") return ScheduleKind::Poly;
  if (text == "constant") return ScheduleKind::Constant;
  return std::nullopt;
}

double poly_lr(double lr_base, int epoch, int epoch_max) {
  if (epoch_max < 1) throw InvalidArgument("epoch_max must be >= 1");
  if (epoch < 0 || epoch > epoch_max) {
    throw InvalidArgument("epoch " + std::to_string(epoch) + " outside [0, " +
                          std::to_string(epoch_max) + "]");
  }
  if (epoch == 0) return lr_base;
  return lr_base * std::pow(1.0 - static_cast<double>(epoch) / epoch_max, 0.9);
}

void TrainConfig::validate() const {
  if (!(lr_base >= 0.0) || !std::isfinite(lr_base)) throw InvalidArgument("lr_base must be >= 0");
  if (epoch_max < 1) throw InvalidArgument("epoch_max must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("momentum must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw InvalidArgument("weight_decay must be >= 0");
  if (loss == LossKind::MseOutlying && !(alpha > 0.0)) {
    throw InvalidArgument("mse-ol needs alpha > 0");
  }
  if (!(focal_gamma >= 0.0)) throw InvalidArgument("focal_gamma must be >= 0");
  for (const std::size_t h : hidden) {
    if (h == 0) throw InvalidArgument("hidden widths must be positive");
  }
}

double TrainConfig::lr_at(int epoch) const {
  return schedule == ScheduleKind::Poly ? poly_lr(lr_base, epoch, epoch_max) : lr_base;
}

ConfusionMatrix confusion_for(const MlpModel& model, const LabeledDataset& dataset) {
  ConfusionMatrix cm(static_cast<int>(model.output_width()));
  ForwardTrace trace;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    forward_into(model, dataset.features(i), trace);
    cm.add(dataset.label(i), argmax(trace.logits()));
  }
  return cm;
}

EvalReport evaluate(const MlpModel& model, const LabeledDataset& dataset) {
  return report(confusion_for(model, dataset));
}

std::vector<std::size_t> canonical_order(const LabeledDataset& dataset) {
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dataset.label(a) != dataset.label(b)) return dataset.label(a) < dataset.label(b);
    const auto fa = dataset.features(a);
    const auto fb = dataset.features(b);
    return std::lexicographical_compare(fa.begin(), fa.end(), fb.begin(), fb.end());
  });
  return order;
}

namespace {

std::vector<std::size_t> model_sizes(const LabeledDataset& train, const Loss& loss,
                                     const TrainConfig& config) {
  std::vector<std::size_t> sizes{train.dim()};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(static_cast<std::size_t>(loss.num_classes()));
  return sizes;
}

void check_shapes(const MlpModel& model, const LabeledDataset& train, const LabeledDataset& val,
                  const Loss& loss) {
  if (train.empty()) throw InvalidArgument("empty training set");
  if (val.empty()) throw InvalidArgument("empty validation set");
  if (train.dim() != model.input_width() || val.dim() != model.input_width()) {
    throw InvalidArgument("dataset width does not match model input");
  }
  const auto k = static_cast<std::size_t>(loss.num_classes());
  if (model.output_width() != k) throw InvalidArgument("model output width != loss classes");
  if (static_cast<std::size_t>(train.num_classes()) > k ||
      static_cast<std::size_t>(val.num_classes()) > k) {
    throw InvalidArgument("dataset has more classes than the loss");
  }
}

std::string where(int epoch, std::size_t batch, double lr) {
  std::ostringstream ss;
  ss << "non-finite loss at epoch " << epoch << ", batch " << batch << ", lr " << lr;
  return ss.str();
}

}  // namespace

TrainResult train_model(MlpModel model, const LabeledDataset& train, const LabeledDataset& val,
                        const Loss& loss, const TrainConfig& config) {
  config.validate();
  check_shapes(model, train, val, loss);
  const auto started = std::chrono::steady_clock::now();

  const std::vector<std::size_t> canonical = canonical_order(train);
  std::vector<std::size_t> order = canonical;
  Rng shuffle_rng = Rng::derive(config.seed, "shuffle");

  ModelGradients grads = model.zero_gradients();
  ModelGradients velocity = model.zero_gradients();
  ForwardTrace trace;
  TrainResult result;
  result.records.reserve(static_cast<std::size_t>(config.epoch_max));

  for (int epoch = 0; epoch < config.epoch_max; ++epoch) {
    const double lr = config.lr_at(epoch);
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      grads.set_zero();
      double batch_sum = 0.0;
      for (std::size_t j = start; j < end; ++j) {
        const std::size_t row = order[j];
        forward_into(model, train.features(row), trace);
        for (const double a : trace.logits()) {
          if (!std::isfinite(a)) throw TrainingError(where(epoch, batch_index, lr));
        }
        const LossGrad lg = loss.evaluate(trace.logits(), train.label(row));
        if (!std::isfinite(lg.value)) throw TrainingError(where(epoch, batch_index, lr));
        batch_sum += lg.value;
        backward_accumulate(model, trace, lg.grad, grads);
      }
      loss_sum += batch_sum;
      grads.scale(1.0 / static_cast<double>(end - start));

      for (std::size_t l = 0; l < model.layers().size(); ++l) {
        auto& p = model.layers()[l];
        const auto& g = grads.layers[l];
        auto& v = velocity.layers[l];
        for (std::size_t i = 0; i < p.weights.size(); ++i) {
          v.weights[i] = config.momentum * v.weights[i] + g.weights[i] +
                         config.weight_decay * p.weights[i];
          p.weights[i] -= lr * v.weights[i];
        }
        for (std::size_t i = 0; i < p.bias.size(); ++i) {
          v.bias[i] = config.momentum * v.bias[i] + g.bias[i] + config.weight_decay * p.bias[i];
          p.bias[i] -= lr * v.bias[i];
        }
      }
    }

    const EvalReport val_report = evaluate(model, val);
    result.records.push_back({epoch + 1, lr, loss_sum / static_cast<double>(order.size()),
                              val_report.accuracy, val_report.macro_f, val_report.miou});
  }

  result.model = std::move(model);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

TrainResult train_model(const LabeledDataset& train, const LabeledDataset& val, const Loss& loss,
                        const TrainConfig& config) {
  config.validate();
  return train_model(init_model(model_sizes(train, loss, config), config.seed), train, val, loss,
                     config);
}

TrainResult train_model(const LabeledDataset& train, const LabeledDataset& val,
                        const TrainConfig& config) {
  config.validate();
  const Loss loss =
      Loss::from_counts(config.loss, train.class_counts(), config.alpha, config.focal_gamma);
  return train_model(train, val, loss, config);
}

AlphaSelection select_alpha(const LabeledDataset& train, const LabeledDataset& val,
                            std::span<const double> candidates, const TrainConfig& config,
                            SelectionMetric metric) {
  if (candidates.empty()) throw InvalidArgument("alpha candidate list is empty");
  AlphaSelection out;
  double best_score = 0.0;
  for (const double alpha : candidates) {
    TrainConfig run = config;
    run.loss = LossKind::MseOutlying;
    run.alpha = alpha;
    TrainResult result;
    try {
      result = train_model(train, val, run);
    } catch (const std::exception& e) {
      std::ostringstream ss;
      ss << "alpha " << alpha << ": " << e.what();
      throw TrainingError(ss.str());
    }
    const EpochRecord& last = result.records.back();
    out.table.push_back({alpha, last.val_macro_f, last.val_miou, last.val_accuracy});
    const double score = metric == SelectionMetric::MacroF ? last.val_macro_f : last.val_miou;
    const bool better = out.table.size() == 1 || score > best_score ||
                        (score == best_score && alpha < out.best_alpha);
    if (better) {
      best_score = score;
      out.best_alpha = alpha;
      out.best_run = std::move(result);
    }
  }
  return out;
}

}  // namespace mseol
