#include "mseol/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "mseol/errors.hpp"

namespace mseol {

FeatureDump dump_features(const MlpModel& model, const LabeledDataset& dataset,
                          const std::string& split_tag) {
  if (dataset.dim() != model.input_width()) {
    throw InvalidArgument("dataset width " + std::to_string(dataset.dim()) +
                          " != model input " + std::to_string(model.input_width()));
  }
  if (static_cast<std::size_t>(dataset.num_classes()) > model.output_width()) {
    throw InvalidArgument("dataset has more classes than the model outputs");
  }
  FeatureDump dump{static_cast<int>(model.output_width()), split_tag, {}};
  dump.rows.reserve(dataset.size());
  ForwardTrace trace;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    forward_into(model, dataset.features(i), trace);
    FeatureRow row;
    row.penultimate.assign(trace.penultimate().begin(), trace.penultimate().end());
    row.logits.assign(trace.logits().begin(), trace.logits().end());
    row.true_class = dataset.label(i);
    row.predicted_class = argmax(trace.logits());
    dump.rows.push_back(std::move(row));
  }
  return dump;
}

namespace {

void write_rows(const FeatureDump& dump, std::ostream& out, char prefix, bool logits) {
  const std::size_t width =
      dump.rows.empty() ? 0
                        : (logits ? dump.rows[0].logits.size() : dump.rows[0].penultimate.size());
  for (std::size_t d = 0; d < width; ++d) out << prefix << d << ',';
  out << "true,pred,split\n";
  char buf[64];
  for (const auto& row : dump.rows) {
    for (const double v : logits ? row.logits : row.penultimate) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << row.true_class << ',' << row.predicted_class << ',' << dump.split << '\n';
  }
}

}  // namespace

void write_features_csv(const FeatureDump& dump, std::ostream& out) {
  write_rows(dump, out, 'f', false);
}

void write_logits_csv(const FeatureDump& dump, std::ostream& out) {
  write_rows(dump, out, 'a', true);
}

std::vector<ClassSpread> class_centroid_spread(const FeatureDump& dump, FeatureSpace space) {
  if (dump.rows.empty()) throw InvalidArgument("empty feature dump");
  int k_count = dump.num_classes;
  for (const auto& row : dump.rows) k_count = std::max(k_count, row.true_class + 1);
  std::vector<ClassSpread> out(static_cast<std::size_t>(k_count));
  std::vector<double> norm_sum(out.size(), 0.0);
  for (const auto& row : dump.rows) {
    const auto& coords = space == FeatureSpace::Logits ? row.logits : row.penultimate;
    auto& s = out[static_cast<std::size_t>(row.true_class)];
    if (s.centroid.empty()) s.centroid.assign(coords.size(), 0.0);
    double sq = 0.0;
    for (std::size_t d = 0; d < coords.size(); ++d) {
      s.centroid[d] += coords[d];
      sq += coords[d] * coords[d];
    }
    norm_sum[static_cast<std::size_t>(row.true_class)] += std::sqrt(sq);
    ++s.count;
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& s = out[k];
    if (s.count == 0) continue;
    for (double& c : s.centroid) c /= static_cast<double>(s.count);
    s.radius = norm_sum[k] / static_cast<double>(s.count);
  }
  return out;
}

}  // namespace mseol
