#ifndef MSEOL_NETWORK_HPP_
#define MSEOL_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mseol {

/// One affine map. `weights` is out x in, row-major.
struct DenseParams {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  friend bool operator==(const DenseParams&, const DenseParams&) = default;
};

/// Gradient buffers laid out exactly like the model's parameters.
struct ModelGradients {
  std::vector<DenseParams> layers;

  void set_zero();
  void scale(double factor);
  void add(const ModelGradients& other);
};

/// Dense feed-forward net: affine + ReLU for every hidden layer, affine only
/// at the output. sizes = {D, h1, ..., p, K}; the last hidden width p is the
/// penultimate layer exported for feature plots.
class MlpModel {
 public:
  MlpModel() = default;
  /// Parameters set to zero.
  explicit MlpModel(std::vector<std::size_t> sizes);

  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  std::size_t input_width() const { return sizes_.front(); }
  std::size_t output_width() const { return sizes_.back(); }
  /// Width of the activation fed to the output layer (the input width for a
  /// single-layer model).
  std::size_t penultimate_width() const { return sizes_[sizes_.size() - 2]; }

  std::vector<DenseParams>& layers() noexcept { return layers_; }
  const std::vector<DenseParams>& layers() const noexcept { return layers_; }

  std::size_t parameter_count() const;
  bool all_finite() const;
  ModelGradients zero_gradients() const;

  friend bool operator==(const MlpModel&, const MlpModel&) = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<DenseParams> layers_;
};

/// Weights ~ N(0, 1) / sqrt(fan_in), biases zero. Deterministic in `seed`.
MlpModel init_model(std::vector<std::size_t> sizes, std::uint64_t seed);

/// activations[0] is the input, activations[l + 1] the output of layer l
/// (post-ReLU for hidden layers, raw for the last one). pre[l] keeps the
/// pre-activation of layer l for the ReLU mask.
struct ForwardTrace {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> activations;

  std::span<const double> logits() const { return activations.back(); }
  std::span<const double> penultimate() const { return activations[activations.size() - 2]; }
};

ForwardTrace forward(const MlpModel& model, std::span<const double> input);

/// Reuses the trace's buffers; used by the training loop.
void forward_into(const MlpModel& model, std::span<const double> input, ForwardTrace& trace);

/// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(logits).
void backward_accumulate(const MlpModel& model, const ForwardTrace& trace,
                         std::span<const double> dlogits, ModelGradients& grads);

ModelGradients backward(const MlpModel& model, const ForwardTrace& trace,
                        std::span<const double> dlogits);

/// Index of the largest entry; the lowest index wins ties.
int argmax(std::span<const double> values);
int predict(const MlpModel& model, std::span<const double> input);

/// Text checkpoint; format documented in docs/checkpoint-format.md.
void save_checkpoint(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace mseol

#endif  // MSEOL_NETWORK_HPP_
