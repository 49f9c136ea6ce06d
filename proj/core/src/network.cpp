#include "mseol/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "mseol/errors.hpp"
#include "mseol/rng.hpp"

namespace mseol {

void ModelGradients::set_zero() {
  for (auto& layer : layers) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
}

void ModelGradients::scale(double factor) {
  for (auto& layer : layers) {
    for (double& w : layer.weights) w *= factor;
    for (double& b : layer.bias) b *= factor;
  }
}

void ModelGradients::add(const ModelGradients& other) {
  if (other.layers.size() != layers.size()) throw InvalidArgument("gradient layout mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& dst = layers[l];
    const auto& src = other.layers[l];
    if (dst.weights.size() != src.weights.size() || dst.bias.size() != src.bias.size()) {
      throw InvalidArgument("gradient layout mismatch");
    }
    for (std::size_t i = 0; i < dst.weights.size(); ++i) dst.weights[i] += src.weights[i];
    for (std::size_t i = 0; i < dst.bias.size(); ++i) dst.bias[i] += src.bias[i];
  }
}

MlpModel::MlpModel(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw InvalidArgument("model needs at least input and output widths");
  for (const std::size_t s : sizes_) {
    if (s == 0) throw InvalidArgument("layer widths must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    DenseParams p;
    p.in = sizes_[l];
    p.out = sizes_[l + 1];
    p.weights.assign(p.in * p.out, 0.0);
    p.bias.assign(p.out, 0.0);
    layers_.push_back(std::move(p));
  }
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

bool MlpModel::all_finite() const {
  for (const auto& layer : layers_) {
    for (const double w : layer.weights) if (!std::isfinite(w)) return false;
    for (const double b : layer.bias) if (!std::isfinite(b)) return false;
  }
  return true;
}

ModelGradients MlpModel::zero_gradients() const {
  ModelGradients g{layers_};
  g.set_zero();
  return g;
}

MlpModel init_model(std::vector<std::size_t> sizes, std::uint64_t seed) {
  MlpModel model(std::move(sizes));
  Rng rng = Rng::derive(seed, "init");
  for (auto& layer : model.layers()) {
    const double scale = std::sqrt(2.0 / static_cast<double>(layer.in));
    for (double& w : layer.weights) w = rng.normal() * scale;
  }
  return model;
}

void forward_into(const MlpModel& model, std::span<const double> input, ForwardTrace& trace) {
  if (input.size() != model.input_width()) {
    throw InvalidArgument("input width " + std::to_string(input.size()) + " != model input " +
                          std::to_string(model.input_width()));
  }
  const auto& layers = model.layers();
  trace.pre.resize(layers.size());
  trace.activations.resize(layers.size() + 1);
  trace.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& p = layers[l];
    const auto& x = trace.activations[l];
    auto& z = trace.pre[l];
    z.resize(p.out);
    for (std::size_t o = 0; o < p.out; ++o) {
      const double* row = p.weights.data() + o * p.in;
      double acc = p.bias[o];
      for (std::size_t i = 0; i < p.in; ++i) acc += row[i] * x[i];
      z[o] = acc;
    }
    auto& a = trace.activations[l + 1];
    a.resize(p.out);
    const bool hidden = l + 1 < layers.size();
    for (std::size_t o = 0; o < p.out; ++o) a[o] = hidden ? std::max(0.0, z[o]) : z[o];
  }
}

ForwardTrace forward(const MlpModel& model, std::span<const double> input) {
  ForwardTrace trace;
  forward_into(model, input, trace);
  return trace;
}

void backward_accumulate(const MlpModel& model, const ForwardTrace& trace,
                         std::span<const double> dlogits, ModelGradients& grads) {
  const auto& layers = model.layers();
  if (trace.pre.size() != layers.size() || trace.activations.size() != layers.size() + 1 ||
      grads.layers.size() != layers.size()) {
    throw InvalidArgument("trace or gradient buffers do not match the model");
  }
  if (dlogits.size() != model.output_width()) {
    throw InvalidArgument("upstream gradient width != model output width");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (trace.pre[l].size() != layers[l].out || trace.activations[l].size() != layers[l].in) {
      throw InvalidArgument("stale trace: shapes differ from model");
    }
  }

  std::vector<double> delta(dlogits.begin(), dlogits.end());
  std::vector<double> upstream;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& p = layers[l];
    auto& g = grads.layers[l];
    const auto& x = trace.activations[l];
    for (std::size_t o = 0; o < p.out; ++o) {
      const double d = delta[o];
      g.bias[o] += d;
      if (d == 0.0) continue;
      double* grow = g.weights.data() + o * p.in;
      for (std::size_t i = 0; i < p.in; ++i) grow[i] += d * x[i];
    }
    if (l == 0) break;
    upstream.assign(p.in, 0.0);
    for (std::size_t o = 0; o < p.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = p.weights.data() + o * p.in;
      for (std::size_t i = 0; i < p.in; ++i) upstream[i] += row[i] * d;
    }
    // ReLU of layer l-1.
    const auto& z = trace.pre[l - 1];
    for (std::size_t i = 0; i < p.in; ++i) {
      if (z[i] <= 0.0) upstream[i] = 0.0;
    }
    delta.swap(upstream);
  }
}

ModelGradients backward(const MlpModel& model, const ForwardTrace& trace,
                        std::span<const double> dlogits) {
  ModelGradients grads = model.zero_gradients();
  backward_accumulate(model, trace, dlogits, grads);
  return grads;
}

int argmax(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<int>(best);
}

int predict(const MlpModel& model, std::span<const double> input) {
  return argmax(forward(model, input).logits());
}

namespace {

constexpr std::string_view kMagic = "mseol-mlp";
constexpr int kVersion = 1;

void write_values(std::ostream& out, std::span<const double> values) {
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ' ';
    const auto res = std::to_chars(buf, buf + sizeof buf, values[i]);
    out.write(buf, res.ptr - buf);
  }
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::vector<std::string> tokens() {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError("unexpected end of checkpoint", row_ + 1);
    ++row_;
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(std::move(t));
    return out;
  }

  template <typename T>
  T number(const std::string& token) const {
    T value{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw ParseError("bad number '" + token + "' in checkpoint", row_);
    }
    return value;
  }

  void values_into(std::vector<double>& dst, std::size_t expected) {
    const auto t = tokens();
    if (t.size() != expected) {
      throw ParseError("expected " + std::to_string(expected) + " values, found " +
                           std::to_string(t.size()),
                       row_);
    }
    for (std::size_t i = 0; i < expected; ++i) dst[i] = number<double>(t[i]);
  }

  std::size_t row() const noexcept { return row_; }

  /// True when only blank lines remain.
  bool at_end() {
    for (std::string line; std::getline(in_, line);) {
      ++row_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return false;
    }
    return true;
  }

  void expect(const std::vector<std::string>& t, std::size_t n, std::string_view keyword) {
    if (t.size() != n || t[0] != keyword) {
      throw ParseError("expected '" + std::string(keyword) + "' record", row_);
    }
  }

 private:
  std::istream& in_;
  std::size_t row_ = 0;
};

}  // namespace

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write checkpoint " + path.string());
  out << kMagic << ' ' << kVersion << '\n';
  out << "sizes " << model.sizes().size();
  for (const std::size_t s : model.sizes()) out << ' ' << s;
  out << '\n';
  for (std::size_t l = 0; l < model.layers().size(); ++l) {
    const auto& p = model.layers()[l];
    out << "layer " << l << " weights " << p.out << ' ' << p.in << '\n';
    for (std::size_t o = 0; o < p.out; ++o) {
      write_values(out, std::span<const double>(p.weights).subspan(o * p.in, p.in));
    }
    out << "layer " << l << " bias " << p.out << '\n';
    write_values(out, p.bias);
  }
  out << "end\n";
  if (!out) throw InvalidArgument("write failed for " + path.string());
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path.string(), 0);
  LineReader reader(in);

  auto t = reader.tokens();
  if (t.size() != 2 || t[0] != kMagic) throw ParseError("not a model checkpoint", 1);
  if (reader.number<int>(t[1]) != kVersion) {
    throw ParseError("unsupported checkpoint version " + t[1], 1);
  }

  t = reader.tokens();
  if (t.size() < 2 || t[0] != "sizes") throw ParseError("expected 'sizes' record", 2);
  const auto n = reader.number<std::size_t>(t[1]);
  if (t.size() != n + 2) throw ParseError("sizes count does not match record", 2);
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < n; ++i) sizes.push_back(reader.number<std::size_t>(t[i + 2]));
  MlpModel model(sizes);

  for (std::size_t l = 0; l < model.layers().size(); ++l) {
    auto& p = model.layers()[l];
    t = reader.tokens();
    reader.expect(t, 5, "layer");
    if (reader.number<std::size_t>(t[1]) != l || t[2] != "weights" ||
        reader.number<std::size_t>(t[3]) != p.out || reader.number<std::size_t>(t[4]) != p.in) {
      throw ParseError("weights header for layer " + std::to_string(l) + " is inconsistent", reader.row());
    }
    std::vector<double> row(p.in);
    for (std::size_t o = 0; o < p.out; ++o) {
      reader.values_into(row, p.in);
      std::copy(row.begin(), row.end(), p.weights.begin() + static_cast<std::ptrdiff_t>(o * p.in));
    }
    t = reader.tokens();
    reader.expect(t, 4, "layer");
    if (reader.number<std::size_t>(t[1]) != l || t[2] != "bias" ||
        reader.number<std::size_t>(t[3]) != p.out) {
      throw ParseError("bias header for layer " + std::to_string(l) + " is inconsistent", reader.row());
    }
    reader.values_into(p.bias, p.out);
  }
  t = reader.tokens();
  if (t.size() != 1 || t[0] != "end") throw ParseError("missing 'end' record", reader.row());
  if (!reader.at_end()) throw ParseError("content after 'end' record", reader.row());
  if (!model.all_finite()) throw ParseError("checkpoint holds non-finite parameters", 0);
  return model;
}

}  // namespace mseol
