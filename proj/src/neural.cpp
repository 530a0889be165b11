#include "uavcov/neural.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "uavcov/errors.hpp"

namespace uavcov {

std::string_view head_mode_name(HeadMode mode) { return mode == HeadMode::Softmax ? "softmax" : "linear"; }

QNetwork::QNetwork(std::size_t input_dim, HeadMode head, std::size_t hidden_width)
    : input_dim_(input_dim), hidden_(hidden_width), head_(head) {
  if (input_dim_ == 0) throw DimensionMismatch("network input dimension must be positive");
  if (hidden_ == 0) throw DimensionMismatch("hidden width must be positive");
  params_.assign(hidden_ * input_dim_ + hidden_ + kOutputCount * hidden_ + kOutputCount, 0.0);
}

QNetwork QNetwork::init(std::size_t input_dim, HeadMode head, Rng& rng, std::size_t hidden_width) {
  QNetwork net(input_dim, head, hidden_width);
  const double hidden_limit = std::sqrt(6.0 / static_cast<double>(input_dim + hidden_width));
  const double output_limit = std::sqrt(6.0 / static_cast<double>(hidden_width + kOutputCount));
  std::uniform_real_distribution<double> hidden_dist(-hidden_limit, hidden_limit);
  std::uniform_real_distribution<double> output_dist(-output_limit, output_limit);
  for (double& w : net.hidden_weights()) w = hidden_dist(rng);
  for (double& w : net.output_weights()) w = output_dist(rng);
  return net;
}

QValues softmax(const QValues& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  QValues out;
  double total = 0.0;
  for (int k = 0; k < kOutputCount; ++k) {
    out[k] = std::exp(logits[k] - peak);
    total += out[k];
  }
  for (double& v : out) v /= total;
  return out;
}

QValues QNetwork::forward(std::span<const double> x, std::span<double> hidden_out, QValues& logits) const {
  if (x.size() != input_dim_) {
    throw DimensionMismatch("input has " + std::to_string(x.size()) + " entries, network expects " +
                            std::to_string(input_dim_));
  }
  const double* w1 = params_.data();
  const double* b1 = params_.data() + b1_offset();
  const double* w2 = params_.data() + w2_offset();
  const double* b2 = params_.data() + b2_offset();
  for (std::size_t i = 0; i < hidden_; ++i) {
    const double* row = w1 + i * input_dim_;
    double acc = b1[i];
    for (std::size_t j = 0; j < input_dim_; ++j) acc += row[j] * x[j];
    hidden_out[i] = acc;
  }
  for (int k = 0; k < kOutputCount; ++k) {
    const double* row = w2 + k * hidden_;
    double acc = b2[k];
    for (std::size_t i = 0; i < hidden_; ++i) acc += row[i] * hidden_out[i];
    logits[k] = acc;
  }
  return head_ == HeadMode::Softmax ? softmax(logits) : logits;
}

QValues QNetwork::forward(std::span<const double> x) const {
  std::vector<double> hidden(hidden_);
  QValues logits{};
  return forward(x, hidden, logits);
}

double batch_loss(const QNetwork& net, std::span<const TrainingExample> batch) {
  if (batch.empty()) throw DimensionMismatch("empty training batch");
  double total = 0.0;
  for (const auto& ex : batch) {
    const double diff = net.forward(ex.input)[ex.action] - ex.target;
    total += diff * diff;
  }
  return total / static_cast<double>(batch.size());
}

double loss_gradient(const QNetwork& net, std::span<const TrainingExample> batch, std::vector<double>& grad) {
  if (batch.empty()) throw DimensionMismatch("empty training batch");
  const std::size_t in = net.input_dim();
  const std::size_t hid = net.hidden_width();
  grad.assign(net.parameter_count(), 0.0);
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + hid * in;
  double* g_w2 = g_b1 + hid;
  double* g_b2 = g_w2 + kOutputCount * hid;
  const auto w2 = net.output_weights();

  std::vector<double> hidden(hid);
  std::vector<double> d_hidden(hid);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const auto& ex : batch) {
    if (ex.action < 0 || ex.action >= kOutputCount) throw RangeError("training action out of range");
    QValues logits{};
    const QValues out = net.forward(ex.input, hidden, logits);
    const double diff = out[ex.action] - ex.target;
    total += diff * diff;

    // dL/d(out[action]) for this example, then through the head.
    const double d_out = 2.0 * diff * scale;
    QValues d_logits{};
    if (net.head() == HeadMode::Softmax) {
      for (int k = 0; k < kOutputCount; ++k) {
        d_logits[k] = d_out * out[ex.action] * ((k == ex.action ? 1.0 : 0.0) - out[k]);
      }
    } else {
      d_logits[ex.action] = d_out;
    }

    std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
    for (int k = 0; k < kOutputCount; ++k) {
      if (d_logits[k] == 0.0) continue;
      g_b2[k] += d_logits[k];
      double* g_row = g_w2 + k * hid;
      const double* w_row = w2.data() + k * hid;
      for (std::size_t i = 0; i < hid; ++i) {
        g_row[i] += d_logits[k] * hidden[i];
        d_hidden[i] += d_logits[k] * w_row[i];
      }
    }
    // Identity activation: the hidden pre-activation gradient is d_hidden.
    for (std::size_t i = 0; i < hid; ++i) {
      g_b1[i] += d_hidden[i];
      double* g_row = g_w1 + i * in;
      const double dh = d_hidden[i];
      for (std::size_t j = 0; j < in; ++j) g_row[j] += dh * ex.input[j];
    }
  }
  return total * scale;
}

void validate(const RmsPropSettings& s) {
  if (!(s.learning_rate > 0) || !std::isfinite(s.learning_rate)) {
    throw RangeError("learning rate must be positive");
  }
  if (!(s.rho >= 0 && s.rho < 1)) throw RangeError("rmsprop rho must lie in [0, 1)");
  if (!(s.epsilon > 0) || !std::isfinite(s.epsilon)) throw RangeError("rmsprop epsilon must be positive");
}

void rmsprop_update(double& param, double grad, double& mean_square, const RmsPropSettings& s) {
  mean_square = s.rho * mean_square + (1.0 - s.rho) * grad * grad;
  param -= s.learning_rate * grad / (std::sqrt(mean_square) + s.epsilon);
}

RmsProp::RmsProp(std::size_t parameter_count, RmsPropSettings settings)
    : settings_(settings), mean_square_(parameter_count, 0.0) {
  validate(settings_);
}

void RmsProp::apply(std::span<double> params, std::span<const double> grad) {
  if (params.size() != mean_square_.size() || grad.size() != mean_square_.size()) {
    throw DimensionMismatch("optimizer state does not match the parameter count");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    rmsprop_update(params[i], grad[i], mean_square_[i], settings_);
  }
}

double train_step(QNetwork& net, RmsProp& optimizer, std::span<const TrainingExample> batch) {
  for (const auto& ex : batch) {
    if (!std::isfinite(ex.target)) throw NonFiniteGradient("training target is not finite");
  }
  std::vector<double> grad;
  const double loss = loss_gradient(net, batch, grad);
  if (!std::isfinite(loss)) throw NonFiniteGradient("training loss is not finite");
  for (double g : grad) {
    if (!std::isfinite(g)) throw NonFiniteGradient("gradient has a non-finite entry");
  }
  optimizer.apply(net.parameters(), grad);
  return loss;
}

// --- checkpoints -----------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'U', 'A', 'V', 'Q', 'N', 'E', 'T', '\0'};

template <typename T>
void put(std::string& buf, T value) {
  static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes little-endian host");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}

  template <typename T>
  T get(const char* what) {
    if (pos_ + sizeof(T) > data_.size()) throw FormatError(std::string("checkpoint truncated reading ") + what);
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  const std::string& data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_network(const QNetwork& net, const std::filesystem::path& path) {
  std::string buf(kMagic, sizeof(kMagic));
  put<std::uint32_t>(buf, kCheckpointVersion);
  put<std::uint64_t>(buf, net.input_dim());
  put<std::uint64_t>(buf, net.hidden_width());
  put<std::uint8_t>(buf, net.head() == HeadMode::Softmax ? 1 : 0);
  put<std::uint64_t>(buf, net.parameter_count());
  for (double p : net.parameters()) put<double>(buf, p);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

QNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(data);
  char magic[sizeof(kMagic)];
  for (char& c : magic) c = r.get<char>("magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw FormatError("not a network checkpoint");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto input_dim = r.get<std::uint64_t>("input_dim");
  const auto hidden = r.get<std::uint64_t>("hidden_width");
  const auto head = r.get<std::uint8_t>("head");
  if (head > 1) throw FormatError("unknown head mode " + std::to_string(head));
  if (input_dim == 0 || hidden == 0 || input_dim > (1u << 24) || hidden > (1u << 24)) {
    throw FormatError("implausible network dimensions");
  }
  QNetwork net(input_dim, head == 1 ? HeadMode::Softmax : HeadMode::Linear, hidden);
  const auto count = r.get<std::uint64_t>("parameter count");
  if (count != net.parameter_count()) throw FormatError("parameter count does not match dimensions");
  for (double& p : net.parameters()) {
    p = r.get<double>("parameters");
    if (!std::isfinite(p)) throw FormatError("checkpoint holds a non-finite parameter");
  }
  if (!r.at_end()) throw FormatError("trailing bytes after checkpoint parameters");
  return net;
}

}  // namespace uavcov
