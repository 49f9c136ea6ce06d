#ifndef MSEOL_METRICS_HPP_
#define MSEOL_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace mseol {

/// K x K counts; rows are the true class, columns the predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);

  int num_classes() const noexcept { return num_classes_; }
  std::uint64_t at(int truth, int predicted) const;
  void add(int truth, int predicted, std::uint64_t count = 1);
  std::uint64_t total() const noexcept { return total_; }

  std::uint64_t true_positives(int k) const { return at(k, k); }
  std::uint64_t false_positives(int k) const;
  std::uint64_t false_negatives(int k) const;

  /// CSV with header "true\\pred,0,1,...,K-1" and one row per true class.
  void write_csv(std::ostream& out) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  void check(int k) const;

  int num_classes_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted,
                          int num_classes);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double iou = 0.0;
};

struct EvalReport {
  double accuracy = 0.0;
  std::vector<ClassScores> per_class;
  double macro_f = 0.0;
  double miou = 0.0;
};

/// Accuracy, per-class P/R/F1/IoU and their unweighted means. Any 0/0 ratio
/// is taken as 0. Throws InvalidArgument on an all-zero matrix.
EvalReport report(const ConfusionMatrix& cm);

}  // namespace mseol

#endif  // MSEOL_METRICS_HPP_
