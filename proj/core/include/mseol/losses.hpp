#ifndef MSEOL_LOSSES_HPP_
#define MSEOL_LOSSES_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mseol/labels.hpp"

namespace mseol {

/// Loss value and its gradient with respect to the raw network outputs.
struct LossGrad {
  double value = 0.0;
  std::vector<double> grad;
};

/// Max-subtracted softmax. Throws InvalidArgument on non-finite logits.
std::vector<double> softmax(std::span<const double> logits);

/// Softmax cross-entropy, -w * log(y_t), with gradient w * (y - onehot(t)).
/// `class_weights` empty means w = 1.
LossGrad ce_loss(std::span<const double> logits, int true_class,
                 std::span<const double> class_weights = {});

/// w_k = median(counts) / counts[k]; the median of an even-length list is the
/// mean of the two middle values.
std::vector<double> median_frequency_weights(std::span<const std::size_t> class_counts);

/// -w * (1 - y_t)^gamma * log(y_t). gamma = 0 is exactly ce_loss.
LossGrad focal_loss(std::span<const double> logits, int true_class, double gamma,
                    std::span<const double> class_weights = {});

/// sum_k 0.5 * (a_k - t_k)^2 on raw logits, gradient a - t.
LossGrad mse_loss(std::span<const double> logits, std::span<const double> target);

enum class LossKind { CrossEntropy, WeightedCrossEntropy, Focal, Mse, MseOutlying };

/// CLI spellings: ce, wce, focal, mse, mse-ol.
std::string_view to_string(LossKind kind);
std::optional<LossKind> parse_loss_kind(std::string_view text);

/// A loss kind bound to everything it needs for per-sample evaluation.
class Loss {
 public:
  Loss(LossKind kind, int num_classes, std::vector<double> class_weights = {},
       double focal_gamma = 2.0, std::optional<TargetTable> table = std::nullopt);

  /// Builds the loss from training-set statistics: median-frequency weights
  /// for wce, a one-hot table for mse, outlying labels for mse-ol.
  static Loss from_counts(LossKind kind, std::span<const std::size_t> class_counts,
                          double alpha = 1.0, double focal_gamma = 2.0);

  LossKind kind() const noexcept { return kind_; }
  int num_classes() const noexcept { return num_classes_; }
  const std::optional<TargetTable>& table() const noexcept { return table_; }
  const std::vector<double>& class_weights() const noexcept { return weights_; }

  LossGrad evaluate(std::span<const double> logits, int true_class) const;

 private:
  LossKind kind_;
  int num_classes_;
  std::vector<double> weights_;
  double gamma_;
  std::optional<TargetTable> table_;
};

struct BatchLoss {
  std::vector<LossGrad> per_sample;
  double mean = 0.0;
};

/// `logits` holds one K-wide row per sample. Per-sample gradients are left
/// unscaled; the trainer applies the 1/batch factor once.
BatchLoss batch_loss(const Loss& loss, std::span<const double> logits,
                     std::span<const int> classes);

}  // namespace mseol

#endif  // MSEOL_LOSSES_HPP_
