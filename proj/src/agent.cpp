#include "edgesim/agent.hpp"

#include <fstream>
#include <stdexcept>

namespace edgesim {

namespace {
constexpr char kMagic[4] = {'E', 'D', 'Q', 'C'};
constexpr uint32_t kVersion = 1;
constexpr int kMaxTerminals = 12; // 2^M joint actions; beyond this the output layer explodes
}  // namespace

DdqnAgent::DdqnAgent(int num_terminals, const AgentConfig& cfg, uint64_t seed, TargetRule rule)
    : num_terminals_(num_terminals),
      cfg_(cfg),
      rule_(rule),
      buffer_(cfg.buffer_capacity),
      rng_(split_seed(seed, 0x51)),
      epsilon_(cfg.epsilon_start) {
  if (num_terminals < 1 || num_terminals > kMaxTerminals) {
    throw std::invalid_argument("DdqnAgent: num_terminals must be in [1, 12]");
  }
  const int input_dim = 2 * num_terminals + 1;
  const int output_dim = 1 << num_terminals;
  q_eval_ = QNetwork(input_dim, cfg.hidden_sizes, output_dim, split_seed(seed, 0x52));
  q_target_ = q_eval_;
}

DdqnAgent::DdqnAgent(const AgentConfig& cfg, TargetRule rule)
    : cfg_(cfg), rule_(rule), buffer_(cfg.buffer_capacity), rng_(0), epsilon_(cfg.epsilon_start) {}

ActionVector DdqnAgent::choose(const SchedulerState& state, const SchedulerContext& ctx) {
  if (state.num_terminals() != num_terminals_) {
    throw std::invalid_argument("DdqnAgent: state width does not match the agent");
  }

  if (learning_ && pending_) {
    Experience experience;
    experience.state = std::move(pending_->state);
    experience.action = pending_->action;
    experience.reward = pending_->reward;
    experience.next_state = state;
    buffer_.push(std::move(experience));
    pending_.reset();

    // Learning starts only once the memory buffer is full, and then runs
    // every train_period-th slot.
    if (buffer_.full()) {
      ++slots_since_train_;
      if (slots_since_train_ >= cfg_.train_period) {
        slots_since_train_ = 0;
        const auto batch = buffer_.sample(cfg_.batch_size, rng_);
        const double loss =
            detail::td_train_step(batch, q_eval_, q_target_, cfg_, rule_ == TargetRule::double_dqn);
        losses_.push_back(loss);
        ++train_steps_;
        epsilon_ = decay_epsilon(cfg_, epsilon_);
        if (train_steps_ % static_cast<uint64_t>(cfg_.target_sync_period) == 0) {
          sync_target(q_eval_, q_target_);
        }
      }
    }
  }

  const std::vector<uint32_t> mask = feasible_mask(state);
  const Eigen::MatrixXd hidden = q_eval_.hidden_forward(state_to_input(state, cfg_));
  std::vector<double> q_of_mask(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    q_of_mask[i] = q_eval_.output_unit(mask[i], hidden.col(0));
  }
  const double epsilon = learning_ ? epsilon_ : 0.0;
  ActionVector action;
  action.bits = select_action_masked(q_of_mask, mask, epsilon, rng_);
  action.num_terminals = num_terminals_;
  return action;
}

void DdqnAgent::feedback(const SchedulerState& state, const ActionVector& action, double reward) {
  if (!learning_) return;
  pending_ = std::make_unique<Pending>();
  pending_->state = state;
  pending_->action = action.bits;
  pending_->reward = reward;
}

void DdqnAgent::end_episode() { pending_.reset(); }

const char* DdqnAgent::name() const {
  return rule_ == TargetRule::double_dqn ? "r_ddqn" : "dqn";
}

std::vector<double> DdqnAgent::drain_losses() {
  std::vector<double> out;
  out.swap(losses_);
  return out;
}

void DdqnAgent::save_checkpoint(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  const uint32_t m = static_cast<uint32_t>(num_terminals_);
  out.write(reinterpret_cast<const char*>(&m), sizeof(m));
  out.write(reinterpret_cast<const char*>(&train_steps_), sizeof(train_steps_));
  out.write(reinterpret_cast<const char*>(&epsilon_), sizeof(epsilon_));
  q_eval_.save(out);
  q_target_.save(out);
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

DdqnAgent DdqnAgent::load_checkpoint(const std::string& path, const AgentConfig& cfg,
                                     TargetRule rule, uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 4) != std::string(kMagic, 4)) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kVersion) throw std::runtime_error("unsupported checkpoint version: " + path);

  DdqnAgent agent(cfg, rule);
  uint32_t m = 0;
  in.read(reinterpret_cast<char*>(&m), sizeof(m));
  agent.num_terminals_ = static_cast<int>(m);
  in.read(reinterpret_cast<char*>(&agent.train_steps_), sizeof(agent.train_steps_));
  in.read(reinterpret_cast<char*>(&agent.epsilon_), sizeof(agent.epsilon_));
  agent.q_eval_ = QNetwork::load(in);
  agent.q_target_ = QNetwork::load(in);
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  if (agent.q_eval_.input_dim() != 2 * agent.num_terminals_ + 1 ||
      agent.q_eval_.output_dim() != (1 << agent.num_terminals_)) {
    throw std::runtime_error("checkpoint layer sizes inconsistent with header: " + path);
  }
  agent.rng_ = Rng(split_seed(seed, 0x51));
  return agent;
}

}  // namespace edgesim
