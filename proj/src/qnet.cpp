#include "edgesim/qnet.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

QNetwork::QNetwork(int input_dim, const std::vector<int>& hidden_sizes, int output_dim,
                   uint64_t seed)
    : input_dim_(input_dim), output_dim_(output_dim) {
  if (input_dim <= 0 || output_dim <= 0) {
    throw std::invalid_argument("QNetwork: layer dimensions must be positive");
  }
  for (int h : hidden_sizes) {
    if (h <= 0) throw std::invalid_argument("QNetwork: layer dimensions must be positive");
  }

  Rng rng(seed);
  int fan_in = input_dim;
  std::vector<int> outs(hidden_sizes);
  outs.push_back(output_dim);
  for (int fan_out : outs) {
    Layer layer;
    layer.w.resize(fan_out, fan_in);
    layer.b = Eigen::VectorXd::Zero(fan_out);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        layer.w(r, c) = rng.uniform(-bound, bound);
      }
    }
    layers_.push_back(std::move(layer));
    fan_in = fan_out;
  }
}

std::vector<int> QNetwork::layer_sizes() const {
  std::vector<int> sizes{input_dim_};
  for (const Layer& l : layers_) sizes.push_back(static_cast<int>(l.w.rows()));
  return sizes;
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& input) const {
  if (input.size() != input_dim_) throw std::invalid_argument("QNetwork::forward: bad input size");
  Eigen::VectorXd a = input;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    a = ((layers_[i].w * a + layers_[i].b).array().max(0.0)).matrix();
  }
  return layers_.back().w * a + layers_.back().b;
}

Eigen::MatrixXd QNetwork::hidden_forward(const Eigen::MatrixXd& inputs) const {
  Eigen::MatrixXd a = inputs;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    a = (((layers_[i].w * a).colwise() + layers_[i].b).array().max(0.0)).matrix();
  }
  return a;
}

double QNetwork::output_unit(int unit, const Eigen::VectorXd& hidden) const {
  const Layer& out = layers_.back();
  return out.w.row(unit).dot(hidden) + out.b(unit);
}

double QNetwork::train_step(const Eigen::MatrixXd& inputs, const std::vector<uint32_t>& actions,
                            const Eigen::VectorXd& targets, double learning_rate) {
  const Eigen::Index batch = inputs.cols();
  if (batch == 0) throw std::invalid_argument("QNetwork::train_step: empty batch");
  if (static_cast<Eigen::Index>(actions.size()) != batch || targets.size() != batch) {
    throw std::invalid_argument("QNetwork::train_step: batch size mismatch");
  }

  // Forward, caching every activation.
  const std::size_t n_hidden = layers_.size() - 1;
  std::vector<Eigen::MatrixXd> acts(n_hidden + 1);
  acts[0] = inputs;
  for (std::size_t i = 0; i < n_hidden; ++i) {
    acts[i + 1] = (((layers_[i].w * acts[i]).colwise() + layers_[i].b).array().max(0.0)).matrix();
  }

  const Layer& out = layers_.back();
  Eigen::VectorXd q(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    q(i) = out.w.row(actions[i]).dot(acts[n_hidden].col(i)) + out.b(actions[i]);
  }

  const Eigen::VectorXd err = q - targets;
  const double loss = err.squaredNorm() / static_cast<double>(batch);

  // Backward. Only the selected output unit of each sample carries gradient.
  const Eigen::VectorXd dq = 2.0 * err / static_cast<double>(batch);
  Eigen::MatrixXd grad_out_w = Eigen::MatrixXd::Zero(out.w.rows(), out.w.cols());
  Eigen::VectorXd grad_out_b = Eigen::VectorXd::Zero(out.b.size());
  Eigen::MatrixXd delta(out.w.cols(), batch); // gradient w.r.t. last hidden acts
  for (Eigen::Index i = 0; i < batch; ++i) {
    grad_out_w.row(actions[i]) += dq(i) * acts[n_hidden].col(i).transpose();
    grad_out_b(actions[i]) += dq(i);
    delta.col(i) = dq(i) * out.w.row(actions[i]).transpose();
  }

  std::vector<Eigen::MatrixXd> grad_w(n_hidden);
  std::vector<Eigen::VectorXd> grad_b(n_hidden);
  for (std::size_t i = n_hidden; i-- > 0;) {
    // ReLU derivative through the cached activation (act > 0 <=> pre-act > 0).
    delta = (delta.array() * (acts[i + 1].array() > 0.0).cast<double>()).matrix();
    grad_w[i] = delta * acts[i].transpose();
    grad_b[i] = delta.rowwise().sum();
    if (i > 0) delta = layers_[i].w.transpose() * delta;
  }

  for (std::size_t i = 0; i < n_hidden; ++i) {
    layers_[i].w -= learning_rate * grad_w[i];
    layers_[i].b -= learning_rate * grad_b[i];
  }
  layers_.back().w -= learning_rate * grad_out_w;
  layers_.back().b -= learning_rate * grad_out_b;

  return loss;
}

bool QNetwork::same_architecture(const QNetwork& other) const {
  return layer_sizes() == other.layer_sizes();
}

void QNetwork::save(std::ostream& out) const {
  const std::vector<int> sizes = layer_sizes();
  const uint32_t n = static_cast<uint32_t>(sizes.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (int s : sizes) {
    const uint32_t v = static_cast<uint32_t>(s);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  for (const Layer& l : layers_) {
    out.write(reinterpret_cast<const char*>(l.w.data()),
              static_cast<std::streamsize>(sizeof(double) * l.w.size()));
    out.write(reinterpret_cast<const char*>(l.b.data()),
              static_cast<std::streamsize>(sizeof(double) * l.b.size()));
  }
}

QNetwork QNetwork::load(std::istream& in) {
  uint32_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n < 2) throw std::runtime_error("QNetwork::load: corrupt header");
  std::vector<int> sizes(n);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    sizes[i] = static_cast<int>(v);
  }
  QNetwork net;
  net.input_dim_ = sizes.front();
  net.output_dim_ = sizes.back();
  net.layers_.resize(n - 1);
  for (uint32_t i = 0; i + 1 < n; ++i) {
    Layer& l = net.layers_[i];
    l.w.resize(sizes[i + 1], sizes[i]);
    l.b.resize(sizes[i + 1]);
    in.read(reinterpret_cast<char*>(l.w.data()),
            static_cast<std::streamsize>(sizeof(double) * l.w.size()));
    in.read(reinterpret_cast<char*>(l.b.data()),
            static_cast<std::streamsize>(sizeof(double) * l.b.size()));
  }
  if (!in) throw std::runtime_error("QNetwork::load: truncated weight data");
  return net;
}

bool QNetwork::weights_equal(const QNetwork& other) const {
  if (!same_architecture(other)) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].w != other.layers_[i].w || layers_[i].b != other.layers_[i].b) return false;
  }
  return true;
}

void sync_target(const QNetwork& q_eval, QNetwork& q_target) {
  if (!q_eval.same_architecture(q_target)) {
    throw std::invalid_argument("sync_target: architectures differ");
  }
  q_target = q_eval;
}

}  // namespace edgesim
