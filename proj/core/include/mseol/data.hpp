#ifndef MSEOL_DATA_HPP_
#define MSEOL_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mseol {

/// Feature vectors with integer class labels in [0, K). Features are stored
/// row-major in one buffer; per-class counts are computed on construction.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  /// Throws InvalidArgument if the buffer size is not labels.size() * dim or
  /// any label falls outside [0, num_classes).
  LabeledDataset(std::size_t dim, int num_classes, std::vector<double> features,
                 std::vector<int> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  int num_classes() const noexcept { return num_classes_; }

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  int label(std::size_t i) const { return labels_[i]; }

  const std::vector<double>& feature_buffer() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::size_t>& class_counts() const noexcept { return class_counts_; }

  /// Rows selected by index, in the given order.
  LabeledDataset select(std::span<const std::size_t> indices) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  std::size_t dim_ = 0;
  int num_classes_ = 0;
  std::vector<double> features_;
  std::vector<int> labels_;
  std::vector<std::size_t> class_counts_;
};

enum class ImbalanceKind { LongTailed, Step };

struct ImbalanceSpec {
  ImbalanceKind kind = ImbalanceKind::LongTailed;
  double ratio = 1.0;       ///< most-frequent count / least-frequent count
  std::size_t n_max = 0;    ///< count of class 0, the most frequent class
};

/// Isotropic Gaussian blobs, one per class.
struct GaussianMixtureSpec {
  int num_classes = 0;
  std::size_t dim = 0;
  std::vector<std::vector<double>> means;
  double stddev = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// counts[k] = floor(n_max * ratio^(-k/(K-1))). Class 0 is the head.
std::vector<std::size_t> long_tailed_counts(int num_classes, const ImbalanceSpec& spec);

/// First ceil(K/2) classes get n_max, the rest floor(n_max / ratio).
std::vector<std::size_t> step_counts(int num_classes, const ImbalanceSpec& spec);

/// Dispatches on spec.kind.
std::vector<std::size_t> imbalanced_counts(int num_classes, const ImbalanceSpec& spec);

/// Per class, draws counts[k] rows uniformly without replacement. Output rows
/// are grouped by class, each group in source order.
LabeledDataset subsample(const LabeledDataset& dataset, std::span<const std::size_t> counts,
                         std::uint64_t seed);

LabeledDataset sample_gaussian_mixture(const GaussianMixtureSpec& spec,
                                       std::span<const std::size_t> counts_per_class);

/// K means evenly spaced on a circle in the first two coordinates, starting at angle 0.
std::vector<std::vector<double>> circle_means(int num_classes, std::size_t dim, double radius);

/// Header "f0,...,f{D-1},label", then one row per sample. Features are
/// written in shortest round-trip form. `num_classes` of the loaded set is
/// max(label)+1 unless a larger value is given.
LabeledDataset load_csv(const std::filesystem::path& path, int num_classes = 0);
void save_csv(const LabeledDataset& dataset, const std::filesystem::path& path);

}  // namespace mseol

#endif  // MSEOL_DATA_HPP_
