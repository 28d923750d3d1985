#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace edgesim {

// Fully connected value network: rectified hidden layers, identity output.
// One output unit per joint action. The output layer is evaluated row-wise so
// callers can score only the feasible actions of a state.
class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(int input_dim, const std::vector<int>& hidden_sizes, int output_dim, uint64_t seed);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  std::vector<int> layer_sizes() const; // input, hidden..., output

  // Full forward pass over every output unit.
  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  // Activations of the last hidden layer; columns are samples.
  Eigen::MatrixXd hidden_forward(const Eigen::MatrixXd& inputs) const;

  // Value of one output unit given last-hidden activations.
  double output_unit(int unit, const Eigen::VectorXd& hidden) const;

  // One SGD step on the mean squared error between the selected output units
  // and `targets`. Columns of `inputs` are samples. Returns the pre-update
  // mean squared error.
  double train_step(const Eigen::MatrixXd& inputs, const std::vector<uint32_t>& actions,
                    const Eigen::VectorXd& targets, double learning_rate);

  bool same_architecture(const QNetwork& other) const;

  void save(std::ostream& out) const;
  static QNetwork load(std::istream& in);

  bool weights_equal(const QNetwork& other) const;

 private:
  struct Layer {
    Eigen::MatrixXd w; // rows = units, cols = inputs
    Eigen::VectorXd b;
  };

  int input_dim_ = 0;
  int output_dim_ = 0;
  std::vector<Layer> layers_; // hidden layers..., output layer
};

// Hard copy of the online network's weights into the target network.
void sync_target(const QNetwork& q_eval, QNetwork& q_target);

}  // namespace edgesim
