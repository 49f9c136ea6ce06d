#include "mseol/labels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mseol/errors.hpp"

namespace mseol {

TargetTable::TargetTable(int num_classes, TargetKind kind, double alpha,
                         std::vector<int> multipliers)
    : num_classes_(num_classes), kind_(kind), alpha_(alpha), multipliers_(std::move(multipliers)) {
  const auto k_count = static_cast<std::size_t>(num_classes_);
  rows_.assign(k_count * k_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    rows_[k * k_count + k] = multipliers_[k] * alpha_;
  }
}

void TargetTable::check_index(int class_index) const {
  if (class_index < 0 || class_index >= num_classes_) {
    throw InvalidArgument("class index " + std::to_string(class_index) + " outside [0, " +
                          std::to_string(num_classes_) + ")");
  }
}

double TargetTable::magnitude(int class_index) const {
  check_index(class_index);
  return multipliers_[static_cast<std::size_t>(class_index)] * alpha_;
}

int TargetTable::multiplier(int class_index) const {
  check_index(class_index);
  return multipliers_[static_cast<std::size_t>(class_index)];
}

std::span<const double> TargetTable::target_for(int class_index) const {
  check_index(class_index);
  const auto k_count = static_cast<std::size_t>(num_classes_);
  return {rows_.data() + static_cast<std::size_t>(class_index) * k_count, k_count};
}

TargetTable one_hot(int num_classes) {
  if (num_classes < 2) throw InvalidArgument("one-hot labels need K >= 2");
  return TargetTable(num_classes, TargetKind::OneHot, 1.0,
                     std::vector<int>(static_cast<std::size_t>(num_classes), 1));
}

TargetTable outlying_labels(std::span<const std::size_t> class_counts, double alpha) {
  if (class_counts.size() < 2) throw InvalidArgument("outlying labels need K >= 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be positive and finite");
  }
  for (std::size_t k = 0; k < class_counts.size(); ++k) {
    if (class_counts[k] == 0) {
      throw InvalidArgument("class " + std::to_string(k) + " has no samples");
    }
  }

  std::vector<int> order(class_counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ca = class_counts[static_cast<std::size_t>(a)];
    const auto cb = class_counts[static_cast<std::size_t>(b)];
    return ca != cb ? ca > cb : a < b;
  });

  std::vector<int> multipliers(class_counts.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    multipliers[static_cast<std::size_t>(order[rank])] = static_cast<int>(rank) + 1;
  }
  return TargetTable(static_cast<int>(class_counts.size()), TargetKind::Outlying, alpha,
                     std::move(multipliers));
}

}  // namespace mseol
