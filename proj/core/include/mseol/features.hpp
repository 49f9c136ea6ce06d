#ifndef MSEOL_FEATURES_HPP_
#define MSEOL_FEATURES_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mseol/data.hpp"
#include "mseol/network.hpp"

namespace mseol {

struct FeatureRow {
  std::vector<double> penultimate;
  std::vector<double> logits;
  int true_class = 0;
  int predicted_class = 0;
};

struct FeatureDump {
  int num_classes = 0;
  std::string split;
  std::vector<FeatureRow> rows;
};

/// Forward pass over every sample; the model is not touched.
FeatureDump dump_features(const MlpModel& model, const LabeledDataset& dataset,
                          const std::string& split_tag);

/// "f0..f{p-1},true,pred,split" for penultimate coordinates.
void write_features_csv(const FeatureDump& dump, std::ostream& out);
/// "a0..a{K-1},true,pred,split" for raw logits.
void write_logits_csv(const FeatureDump& dump, std::ostream& out);

enum class FeatureSpace { Penultimate, Logits };

struct ClassSpread {
  std::vector<double> centroid;   ///< empty when the class has no rows
  std::optional<double> radius;   ///< mean Euclidean norm; absent for empty classes
  std::size_t count = 0;
};

/// One entry per class, grouped by true class.
std::vector<ClassSpread> class_centroid_spread(const FeatureDump& dump,
                                               FeatureSpace space = FeatureSpace::Penultimate);

}  // namespace mseol

#endif  // MSEOL_FEATURES_HPP_
