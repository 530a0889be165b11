#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace uavcov {

using Rng = std::mt19937_64;

enum class HeadMode { Linear, Softmax };

std::string_view head_mode_name(HeadMode mode);

inline constexpr int kOutputCount = 4;
inline constexpr int kDefaultHiddenWidth = 167;

using QValues = std::array<double, kOutputCount>;

// Two dense layers: input -> hidden (identity activation) -> 4 outputs,
// optionally passed through a softmax.
//
// All parameters live in one contiguous buffer in checkpoint order:
//   hidden weights (hidden x input, row-major), hidden bias,
//   output weights (4 x hidden, row-major), output bias.
class QNetwork {
 public:
  // Zero-initialized network.
  QNetwork(std::size_t input_dim, HeadMode head, std::size_t hidden_width = kDefaultHiddenWidth);

  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static QNetwork init(std::size_t input_dim, HeadMode head, Rng& rng,
                       std::size_t hidden_width = kDefaultHiddenWidth);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_width() const { return hidden_; }
  HeadMode head() const { return head_; }

  std::size_t parameter_count() const { return params_.size(); }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  std::span<double> hidden_weights() { return {params_.data(), hidden_ * input_dim_}; }
  std::span<double> hidden_bias() { return {params_.data() + b1_offset(), hidden_}; }
  std::span<double> output_weights() { return {params_.data() + w2_offset(), kOutputCount * hidden_}; }
  std::span<double> output_bias() { return {params_.data() + b2_offset(), kOutputCount}; }
  std::span<const double> hidden_weights() const { return {params_.data(), hidden_ * input_dim_}; }
  std::span<const double> hidden_bias() const { return {params_.data() + b1_offset(), hidden_}; }
  std::span<const double> output_weights() const {
    return {params_.data() + w2_offset(), kOutputCount * hidden_};
  }
  std::span<const double> output_bias() const { return {params_.data() + b2_offset(), kOutputCount}; }

  // Throws DimensionMismatch when x has the wrong length.
  QValues forward(std::span<const double> x) const;

  // Forward pass that also exposes the hidden activations and logits.
  QValues forward(std::span<const double> x, std::span<double> hidden_out, QValues& logits) const;

  friend bool operator==(const QNetwork&, const QNetwork&) = default;

 private:
  std::size_t b1_offset() const { return hidden_ * input_dim_; }
  std::size_t w2_offset() const { return b1_offset() + hidden_; }
  std::size_t b2_offset() const { return w2_offset() + kOutputCount * hidden_; }

  std::size_t input_dim_;
  std::size_t hidden_;
  HeadMode head_;
  std::vector<double> params_;
};

QValues softmax(const QValues& logits);

struct TrainingExample {
  std::span<const double> input;
  int action = 0;
  double target = 0.0;
};

// Mean over the batch of (forward(x)[action] - target)^2.
double batch_loss(const QNetwork& net, std::span<const TrainingExample> batch);

// Analytic gradient of batch_loss with respect to every parameter, written
// into `grad` (resized to parameter_count()). Returns the loss.
double loss_gradient(const QNetwork& net, std::span<const TrainingExample> batch,
                     std::vector<double>& grad);

struct RmsPropSettings {
  double learning_rate = 0.1;
  double rho = 0.9;
  double epsilon = 1e-8;
};

// Validates the settings; throws RangeError.
void validate(const RmsPropSettings& settings);

// v' = rho v + (1 - rho) g^2 ; param' = param - lr g / (sqrt(v') + eps)
void rmsprop_update(double& param, double grad, double& mean_square, const RmsPropSettings& s);

class RmsProp {
 public:
  RmsProp(std::size_t parameter_count, RmsPropSettings settings);

  const RmsPropSettings& settings() const { return settings_; }
  std::span<const double> mean_square() const { return mean_square_; }

  void apply(std::span<double> params, std::span<const double> grad);

 private:
  RmsPropSettings settings_;
  std::vector<double> mean_square_;
};

// One optimizer step on the selected-action squared error. Returns the loss
// before the update. Throws NonFiniteGradient (leaving the network untouched)
// when the loss or any gradient entry is not finite.
double train_step(QNetwork& net, RmsProp& optimizer, std::span<const TrainingExample> batch);

// Binary checkpoint, little-endian:
//   "UAVQNET\0", u32 version, u64 input_dim, u64 hidden_width, u8 head,
//   u64 parameter count, parameters as IEEE-754 doubles.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_network(const QNetwork& net, const std::filesystem::path& path);
QNetwork load_network(const std::filesystem::path& path);

}  // namespace uavcov
