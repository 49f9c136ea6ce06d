#ifndef MSEOL_LABELS_HPP_
#define MSEOL_LABELS_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace mseol {

enum class TargetKind { OneHot, Outlying };

/// Per-class teacher vectors. Row k is the regression target for samples of
/// class k: zero everywhere except index k. Immutable once built.
class TargetTable {
 public:
  int num_classes() const noexcept { return num_classes_; }
  TargetKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }

  /// Hot value of row k (1 for one-hot, multiplier(k) * alpha for outlying).
  double magnitude(int class_index) const;

  /// Rank multiplier in 1..K; always 1 for one-hot tables.
  int multiplier(int class_index) const;

  /// Row `class_index`; throws InvalidArgument outside [0, K).
  std::span<const double> target_for(int class_index) const;

  friend TargetTable one_hot(int num_classes);
  friend TargetTable outlying_labels(std::span<const std::size_t> class_counts, double alpha);

 private:
  TargetTable(int num_classes, TargetKind kind, double alpha, std::vector<int> multipliers);
  void check_index(int class_index) const;

  int num_classes_ = 0;
  TargetKind kind_ = TargetKind::OneHot;
  double alpha_ = 1.0;
  std::vector<int> multipliers_;
  std::vector<double> rows_;  // K x K, row-major
};

/// Identity table. Throws InvalidArgument for K < 2.
TargetTable one_hot(int num_classes);

/// Outlying labels: rank classes by sample count, most frequent first, and
/// scale each class's one-hot row by (rank + 1) * alpha. The most frequent
/// class therefore sits at alpha and the rarest at K * alpha. Tied counts are
/// ranked by ascending class index.
TargetTable outlying_labels(std::span<const std::size_t> class_counts, double alpha);

}  // namespace mseol

#endif  // MSEOL_LABELS_HPP_
