#include "mseol/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "mseol/errors.hpp"
#include "mseol/rng.hpp"

namespace mseol {

LabeledDataset::LabeledDataset(std::size_t dim, int num_classes, std::vector<double> features,
                               std::vector<int> labels)
    : dim_(dim),
      num_classes_(num_classes),
      features_(std::move(features)),
      labels_(std::move(labels)) {
  if (num_classes_ < 1) throw InvalidArgument("dataset needs at least one class");
  if (features_.size() != labels_.size() * dim_) {
    throw InvalidArgument("feature buffer holds " + std::to_string(features_.size()) +
                          " values, expected " + std::to_string(labels_.size() * dim_));
  }
  class_counts_.assign(static_cast<std::size_t>(num_classes_), 0);
  for (const int label : labels_) {
    if (label < 0 || label >= num_classes_) {
      throw InvalidArgument("label " + std::to_string(label) + " outside [0, " +
                            std::to_string(num_classes_) + ")");
    }
    ++class_counts_[static_cast<std::size_t>(label)];
  }
}

LabeledDataset LabeledDataset::select(std::span<const std::size_t> indices) const {
  std::vector<double> features;
  std::vector<int> labels;
  features.reserve(indices.size() * dim_);
  labels.reserve(indices.size());
  for (const std::size_t i : indices) {
    if (i >= size()) throw InvalidArgument("row index out of range");
    const auto row = this->features(i);
    features.insert(features.end(), row.begin(), row.end());
    labels.push_back(labels_[i]);
  }
  return LabeledDataset(dim_, num_classes_, std::move(features), std::move(labels));
}

void GaussianMixtureSpec::validate() const {
  if (num_classes < 1) throw InvalidArgument("mixture needs at least one class");
  if (dim == 0) throw InvalidArgument("mixture dimension must be positive");
  if (means.size() != static_cast<std::size_t>(num_classes)) {
    throw InvalidArgument("mixture has " + std::to_string(means.size()) + " means for " +
                          std::to_string(num_classes) + " classes");
  }
  for (const auto& m : means) {
    if (m.size() != dim) throw InvalidArgument("mean vector width does not match dim");
  }
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    throw InvalidArgument("mixture stddev must be positive and finite");
  }
}

namespace {

void validate_imbalance(int num_classes, const ImbalanceSpec& spec) {
  if (num_classes < 2) throw InvalidArgument("imbalance needs at least two classes");
  if (!(spec.ratio >= 1.0) || !std::isfinite(spec.ratio)) {
    throw InvalidArgument("imbalance ratio must be >= 1");
  }
  if (spec.n_max == 0) throw InvalidArgument("n_max must be positive");
}

// Values that land within 1e-9 (relative) below an integer are taken as that
// integer, so 90 * 9^(-1/2) floors to 30 rather than 29.
std::size_t floor_snapped(double v) {
  const double nearest = std::round(v);
  if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, std::abs(v))) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::floor(v));
}

std::size_t tail_count(const ImbalanceSpec& spec) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(spec.n_max) / spec.ratio));
}

void require_nonempty(const std::vector<std::size_t>& counts) {
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      throw InvalidArgument("class " + std::to_string(k) +
                            " would be empty; increase n_max or lower the ratio");
    }
  }
}

}  // namespace

std::vector<std::size_t> long_tailed_counts(int num_classes, const ImbalanceSpec& spec) {
  validate_imbalance(num_classes, spec);
  const auto k_count = static_cast<std::size_t>(num_classes);
  std::vector<std::size_t> counts(k_count);
  counts.front() = spec.n_max;
  counts.back() = tail_count(spec);
  for (std::size_t k = 1; k + 1 < k_count; ++k) {
    const double exponent = static_cast<double>(k) / static_cast<double>(k_count - 1);
    counts[k] = floor_snapped(static_cast<double>(spec.n_max) / std::pow(spec.ratio, exponent));
  }
  require_nonempty(counts);
  return counts;
}

std::vector<std::size_t> step_counts(int num_classes, const ImbalanceSpec& spec) {
  validate_imbalance(num_classes, spec);
  const auto k_count = static_cast<std::size_t>(num_classes);
  const std::size_t frequent = (k_count + 1) / 2;
  std::vector<std::size_t> counts(k_count, tail_count(spec));
  std::fill_n(counts.begin(), frequent, spec.n_max);
  require_nonempty(counts);
  return counts;
}

std::vector<std::size_t> imbalanced_counts(int num_classes, const ImbalanceSpec& spec) {
  return spec.kind == ImbalanceKind::LongTailed ? long_tailed_counts(num_classes, spec)
                                                : step_counts(num_classes, spec);
}

LabeledDataset subsample(const LabeledDataset& dataset, std::span<const std::size_t> counts,
                         std::uint64_t seed) {
  const auto k_count = static_cast<std::size_t>(dataset.num_classes());
  if (counts.size() != k_count) {
    throw InvalidArgument("subsample expects " + std::to_string(k_count) + " counts, got " +
                          std::to_string(counts.size()));
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    if (counts[k] > dataset.class_counts()[k]) {
      throw InsufficientSamples(static_cast<int>(k), counts[k], dataset.class_counts()[k]);
    }
  }

  std::vector<std::vector<std::size_t>> by_class(k_count);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class[static_cast<std::size_t>(dataset.label(i))].push_back(i);
  }

  Rng rng = Rng::derive(seed, "subsample");
  std::vector<std::size_t> chosen;
  for (std::size_t k = 0; k < k_count; ++k) {
    auto& pool = by_class[k];
    // Partial Fisher-Yates: the first counts[k] slots end up a uniform draw.
    for (std::size_t i = 0; i < counts[k]; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(counts[k]));
    chosen.insert(chosen.end(), pool.begin(),
                  pool.begin() + static_cast<std::ptrdiff_t>(counts[k]));
  }
  return dataset.select(chosen);
}

LabeledDataset sample_gaussian_mixture(const GaussianMixtureSpec& spec,
                                       std::span<const std::size_t> counts_per_class) {
  spec.validate();
  if (counts_per_class.size() != static_cast<std::size_t>(spec.num_classes)) {
    throw InvalidArgument("need one count per mixture component");
  }
  Rng rng = Rng::derive(spec.seed, "gaussian-mixture");
  std::vector<double> features;
  std::vector<int> labels;
  for (int k = 0; k < spec.num_classes; ++k) {
    const auto& mean = spec.means[static_cast<std::size_t>(k)];
    for (std::size_t n = 0; n < counts_per_class[static_cast<std::size_t>(k)]; ++n) {
      for (std::size_t d = 0; d < spec.dim; ++d) {
        features.push_back(mean[d] + spec.stddev * rng.normal());
      }
      labels.push_back(k);
    }
  }
  return LabeledDataset(spec.dim, spec.num_classes, std::move(features), std::move(labels));
}

std::vector<std::vector<double>> circle_means(int num_classes, std::size_t dim, double radius) {
  if (num_classes < 1) throw InvalidArgument("circle_means needs at least one class");
  if (dim < 2) throw InvalidArgument("circle_means needs dim >= 2");
  std::vector<std::vector<double>> means;
  for (int k = 0; k < num_classes; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / num_classes;
    std::vector<double> m(dim, 0.0);
    m[0] = radius * std::cos(angle);
    m[1] = radius * std::sin(angle);
    means.push_back(std::move(m));
  }
  return means;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_number(std::string_view cell, std::size_t row) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw ParseError("non-numeric cell '" + std::string(cell) + "'", row);
  }
  return value;
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path, int num_classes) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + " is empty", 1);
  const auto header = split_commas(line);
  if (trim(header.back()) != "label") {
    throw ParseError("missing label column (last header cell must be 'label')", 1);
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t d = 0; d < dim; ++d) {
    if (trim(header[d]) != "f" + std::to_string(d)) {
      throw ParseError("header cell " + std::to_string(d) + " should be f" + std::to_string(d), 1);
    }
  }

  std::vector<double> features;
  std::vector<int> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != dim + 1) {
      throw ParseError("expected " + std::to_string(dim + 1) + " cells, found " +
                       std::to_string(cells.size()),
                       row);
    }
    for (std::size_t d = 0; d < dim; ++d) features.push_back(parse_number<double>(cells[d], row));
    const int label = parse_number<int>(cells[dim], row);
    if (label < 0) throw ParseError("negative label", row);
    labels.push_back(label);
  }
  int inferred = 0;
  for (const int label : labels) inferred = std::max(inferred, label + 1);
  if (num_classes > 0 && inferred > num_classes) {
    throw ParseError("label " + std::to_string(inferred - 1) + " exceeds class count " +
                         std::to_string(num_classes),
                     0);
  }
  return LabeledDataset(dim, std::max({num_classes, inferred, 1}), std::move(features),
                        std::move(labels));
}

void save_csv(const LabeledDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  for (std::size_t d = 0; d < dataset.dim(); ++d) out << 'f' << d << ',';
  out << "label\n";
  char buf[64];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (const double v : dataset.features(i)) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << dataset.label(i) << '\n';
  }
  if (!out) throw InvalidArgument("write failed for " + path.string());
}

}  // namespace mseol
