#include "mseol/metrics.hpp"

#include <ostream>
#include <string>

#include "mseol/errors.hpp"

namespace mseol {

ConfusionMatrix::ConfusionMatrix(int num_classes) : num_classes_(num_classes) {
  if (num_classes_ < 1) throw InvalidArgument("confusion matrix needs K >= 1");
  counts_.assign(static_cast<std::size_t>(num_classes_) * static_cast<std::size_t>(num_classes_),
                 0);
}

void ConfusionMatrix::check(int k) const {
  if (k < 0 || k >= num_classes_) {
    throw InvalidArgument("label " + std::to_string(k) + " outside [0, " +
                          std::to_string(num_classes_) + ")");
  }
}

std::uint64_t ConfusionMatrix::at(int truth, int predicted) const {
  check(truth);
  check(predicted);
  return counts_[static_cast<std::size_t>(truth * num_classes_ + predicted)];
}

void ConfusionMatrix::add(int truth, int predicted, std::uint64_t count) {
  check(truth);
  check(predicted);
  counts_[static_cast<std::size_t>(truth * num_classes_ + predicted)] += count;
  total_ += count;
}

std::uint64_t ConfusionMatrix::false_positives(int k) const {
  std::uint64_t n = 0;
  for (int t = 0; t < num_classes_; ++t) {
    if (t != k) n += at(t, k);
  }
  return n;
}

std::uint64_t ConfusionMatrix::false_negatives(int k) const {
  std::uint64_t n = 0;
  for (int p = 0; p < num_classes_; ++p) {
    if (p != k) n += at(k, p);
  }
  return n;
}

void ConfusionMatrix::write_csv(std::ostream& out) const {
  out << "true\\pred";
  for (int p = 0; p < num_classes_; ++p) out << ',' << p;
  out << '\n';
  for (int t = 0; t < num_classes_; ++t) {
    out << t;
    for (int p = 0; p < num_classes_; ++p) out << ',' << at(t, p);
    out << '\n';
  }
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted,
                          int num_classes) {
  if (truth.size() != predicted.size()) {
    throw InvalidArgument("truth has " + std::to_string(truth.size()) +
                          " labels, predictions have " + std::to_string(predicted.size()));
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

EvalReport report(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InvalidArgument("cannot report on an empty confusion matrix");
  EvalReport r;
  const int k_count = cm.num_classes();
  double trace = 0.0;
  for (int k = 0; k < k_count; ++k) {
    const auto tp = static_cast<double>(cm.true_positives(k));
    const auto fp = static_cast<double>(cm.false_positives(k));
    const auto fn = static_cast<double>(cm.false_negatives(k));
    trace += tp;
    ClassScores s;
    s.precision = ratio(tp, tp + fp);
    s.recall = ratio(tp, tp + fn);
    s.f1 = ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
    s.iou = ratio(tp, tp + fp + fn);
    r.macro_f += s.f1;
    r.miou += s.iou;
    r.per_class.push_back(s);
  }
  r.accuracy = trace / static_cast<double>(cm.total());
  r.macro_f /= k_count;
  r.miou /= k_count;
  return r;
}

}  // namespace mseol
