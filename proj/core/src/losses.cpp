#include "mseol/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mseol/errors.hpp"

namespace mseol {

namespace {

void check_finite(std::span<const double> logits) {
  if (logits.empty()) throw InvalidArgument("empty logit vector");
  for (const double a : logits) {
    if (!std::isfinite(a)) throw InvalidArgument("non-finite logit");
  }
}

void check_class(std::span<const double> logits, int true_class) {
  if (true_class < 0 || static_cast<std::size_t>(true_class) >= logits.size()) {
    throw InvalidArgument("true class " + std::to_string(true_class) + " outside [0, " +
                          std::to_string(logits.size()) + ")");
  }
}

double weight_for(std::span<const double> class_weights, std::size_t width, int true_class) {
  if (class_weights.empty()) return 1.0;
  if (class_weights.size() != width) throw InvalidArgument("class weight count != K");
  return class_weights[static_cast<std::size_t>(true_class)];
}

// Probabilities plus log(y_t) and 1 - y_t, the latter summed from the other
// classes so it keeps precision when y_t is close to 1.
struct SoftmaxStats {
  std::vector<double> probs;
  double log_p;
  double one_minus_p;
};

SoftmaxStats softmax_stats(std::span<const double> logits, int true_class) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  std::vector<double> e(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    e[i] = std::exp(logits[i] - max_logit);
    sum += e[i];
  }
  double rest = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (static_cast<int>(i) != true_class) rest += e[i];
    e[i] /= sum;
  }
  const auto t = static_cast<std::size_t>(true_class);
  return {std::move(e), logits[t] - max_logit - std::log(sum), rest / sum};
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  check_finite(logits);
  return softmax_stats(logits, 0).probs;
}

LossGrad ce_loss(std::span<const double> logits, int true_class,
                 std::span<const double> class_weights) {
  check_finite(logits);
  check_class(logits, true_class);
  const double w = weight_for(class_weights, logits.size(), true_class);
  auto stats = softmax_stats(logits, true_class);
  LossGrad out{-w * stats.log_p, std::move(stats.probs)};
  out.grad[static_cast<std::size_t>(true_class)] -= 1.0;
  for (double& g : out.grad) g *= w;
  return out;
}

std::vector<double> median_frequency_weights(std::span<const std::size_t> class_counts) {
  if (class_counts.empty()) throw InvalidArgument("median weights need at least one count");
  std::vector<double> sorted(class_counts.begin(), class_counts.end());
  for (const double c : sorted) {
    if (c < 1.0) throw InvalidArgument("median weights need every count >= 1");
  }
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  std::vector<double> weights;
  weights.reserve(n);
  for (const std::size_t c : class_counts) weights.push_back(median / static_cast<double>(c));
  return weights;
}

LossGrad focal_loss(std::span<const double> logits, int true_class, double gamma,
                    std::span<const double> class_weights) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("focal gamma must be >= 0");
  if (gamma == 0.0) return ce_loss(logits, true_class, class_weights);
  check_finite(logits);
  check_class(logits, true_class);
  const double w = weight_for(class_weights, logits.size(), true_class);
  auto stats = softmax_stats(logits, true_class);
  const double q = stats.one_minus_p;
  const double p = 1.0 - q;
  const double q_gamma = std::pow(q, gamma);

  // dL/dp = -w * (-gamma q^(gamma-1) log p + q^gamma / p), and
  // dp/da_j = p (delta_tj - y_j), so dL/da_j = w * c * (y_j - delta_tj) with
  // c = q^gamma - gamma q^(gamma-1) p log p. At q == 0 the second term is 0.
  const double tilt = q > 0.0 ? gamma * std::pow(q, gamma - 1.0) * p * stats.log_p : 0.0;
  const double c = w * (q_gamma - tilt);

  LossGrad out{-w * q_gamma * stats.log_p, std::move(stats.probs)};
  out.grad[static_cast<std::size_t>(true_class)] -= 1.0;
  for (double& g : out.grad) g *= c;
  return out;
}

LossGrad mse_loss(std::span<const double> logits, std::span<const double> target) {
  if (logits.size() != target.size()) {
    throw InvalidArgument("mse: logits have " + std::to_string(logits.size()) +
                          " entries, target has " + std::to_string(target.size()));
  }
  check_finite(logits);
  LossGrad out{0.0, std::vector<double>(logits.size())};
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double d = logits[i] - target[i];
    out.value += 0.5 * d * d;
    out.grad[i] = d;
  }
  return out;
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::CrossEntropy: return "ce";
    case LossKind::WeightedCrossEntropy: return "wce";
    case LossKind::Focal: return "focal";
    case LossKind::Mse: return "mse";
    case LossKind::MseOutlying: return "mse-ol";
  }
  return "?";
}

std::optional<LossKind> parse_loss_kind(std::string_view text) {
  for (const auto kind : {LossKind::CrossEntropy, LossKind::WeightedCrossEntropy,
                          LossKind::Focal, LossKind::Mse, LossKind::MseOutlying}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

Loss::Loss(LossKind kind, int num_classes, std::vector<double> class_weights, double focal_gamma,
           std::optional<TargetTable> table)
    : kind_(kind),
      num_classes_(num_classes),
      weights_(std::move(class_weights)),
      gamma_(focal_gamma),
      table_(std::move(table)) {
  if (num_classes_ < 2) throw InvalidArgument("loss needs K >= 2");
  if (!weights_.empty() && weights_.size() != static_cast<std::size_t>(num_classes_)) {
    throw InvalidArgument("class weight count != K");
  }
  const bool needs_table = kind_ == LossKind::Mse || kind_ == LossKind::MseOutlying;
  if (needs_table && !table_) throw InvalidArgument("mse losses need a target table");
  if (table_ && table_->num_classes() != num_classes_) {
    throw InvalidArgument("target table width != K");
  }
  if (kind_ == LossKind::WeightedCrossEntropy && weights_.empty()) {
    throw InvalidArgument("wce needs class weights");
  }
  if (kind_ == LossKind::Focal && !(gamma_ >= 0.0)) {
    throw InvalidArgument("focal gamma must be >= 0");
  }
}

Loss Loss::from_counts(LossKind kind, std::span<const std::size_t> class_counts, double alpha,
                       double focal_gamma) {
  const int k = static_cast<int>(class_counts.size());
  switch (kind) {
    case LossKind::CrossEntropy:
      return Loss(kind, k);
    case LossKind::WeightedCrossEntropy:
      return Loss(kind, k, median_frequency_weights(class_counts));
    case LossKind::Focal:
      return Loss(kind, k, {}, focal_gamma);
    case LossKind::Mse:
      return Loss(kind, k, {}, focal_gamma, one_hot(k));
    case LossKind::MseOutlying:
      return Loss(kind, k, {}, focal_gamma, outlying_labels(class_counts, alpha));
  }
  throw InvalidArgument("unknown loss kind");
}

LossGrad Loss::evaluate(std::span<const double> logits, int true_class) const {
  if (logits.size() != static_cast<std::size_t>(num_classes_)) {
    throw InvalidArgument("logit width != K");
  }
  switch (kind_) {
    case LossKind::CrossEntropy:
    case LossKind::WeightedCrossEntropy:
      return ce_loss(logits, true_class, weights_);
    case LossKind::Focal:
      return focal_loss(logits, true_class, gamma_, weights_);
    case LossKind::Mse:
    case LossKind::MseOutlying:
      return mse_loss(logits, table_->target_for(true_class));
  }
  throw InvalidArgument("unknown loss kind");
}

BatchLoss batch_loss(const Loss& loss, std::span<const double> logits,
                     std::span<const int> classes) {
  if (classes.empty()) throw InvalidArgument("empty batch");
  const auto k = static_cast<std::size_t>(loss.num_classes());
  if (logits.size() != classes.size() * k) throw InvalidArgument("batch logits shape mismatch");
  BatchLoss out;
  out.per_sample.reserve(classes.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    out.per_sample.push_back(loss.evaluate(logits.subspan(i * k, k), classes[i]));
    sum += out.per_sample.back().value;
  }
  out.mean = sum / static_cast<double>(classes.size());
  return out;
}

}  // namespace mseol
