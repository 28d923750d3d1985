#include "edgesim/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace edgesim {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(path + "." + item.key() + ": unknown key");
  }
}

double get_num(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string get_str(const json& obj, const std::string& path, const char* key,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> get_num_list(const json& obj, const std::string& path, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(path + "." + key + ": expected a nonempty array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(path + "." + key + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void parse_world(const json& obj, const std::string& path, WorldConfig& world) {
  check_keys(obj, path,
             {"num_terminals", "num_servers", "total_slots", "slot_s", "arena", "servers",
              "terminal_profile", "radio", "lambda", "alpha0", "speed_min_mps", "speed_max_mps",
              "tasks"});
  world.num_terminals = get_int(obj, path, "num_terminals", world.num_terminals);
  world.total_slots = get_int(obj, path, "total_slots", world.total_slots);
  world.slot_s = get_num(obj, path, "slot_s", world.slot_s);
  world.lambda = get_num(obj, path, "lambda", world.lambda);
  world.alpha0 = get_num(obj, path, "alpha0", world.alpha0);
  world.speed_min_mps = get_num(obj, path, "speed_min_mps", world.speed_min_mps);
  world.speed_max_mps = get_num(obj, path, "speed_max_mps", world.speed_max_mps);

  if (obj.contains("arena")) {
    const json& arena = obj.at("arena");
    const std::string apath = path + ".arena";
    check_keys(arena, apath, {"width_m", "height_m"});
    world.arena_width_m = get_num(arena, apath, "width_m", world.arena_width_m);
    world.arena_height_m = get_num(arena, apath, "height_m", world.arena_height_m);
  }

  if (obj.contains("servers")) {
    const json& servers = obj.at("servers");
    if (!servers.is_array() || servers.empty()) {
      throw ConfigError(path + ".servers: expected a nonempty array");
    }
    world.servers.clear();
    for (std::size_t n = 0; n < servers.size(); ++n) {
      const std::string spath = path + ".servers[" + std::to_string(n) + "]";
      const json& s = servers[n];
      check_keys(s, spath, {"x_m", "y_m", "coverage_radius_m", "cpu_hz", "bits_per_cycle"});
      ServerPlacement p;
      p.x_m = get_num(s, spath, "x_m", 0.0);
      p.y_m = get_num(s, spath, "y_m", 0.0);
      p.profile.coverage_radius_m = get_num(s, spath, "coverage_radius_m", 0.0);
      p.profile.cpu_hz = get_num(s, spath, "cpu_hz", 0.0);
      p.profile.bits_per_cycle = get_num(s, spath, "bits_per_cycle", 0.0);
      world.servers.push_back(p);
    }
    world.num_servers = static_cast<int>(world.servers.size());
    if (obj.contains("num_servers") &&
        get_int(obj, path, "num_servers", world.num_servers) != world.num_servers) {
      throw ConfigError(path + ".num_servers: does not match the servers array");
    }
  } else if (obj.contains("num_servers") &&
             get_int(obj, path, "num_servers", 0) != static_cast<int>(world.servers.size())) {
    throw ConfigError(path + ".num_servers: provide a matching world.servers array");
  }

  if (obj.contains("terminal_profile")) {
    const json& t = obj.at("terminal_profile");
    const std::string tpath = path + ".terminal_profile";
    check_keys(t, tpath, {"cpu_hz", "bits_per_cycle", "p_comp_w", "p_idle_w", "p_tran_w"});
    world.terminal.cpu_hz = get_num(t, tpath, "cpu_hz", world.terminal.cpu_hz);
    world.terminal.bits_per_cycle = get_num(t, tpath, "bits_per_cycle", world.terminal.bits_per_cycle);
    world.terminal.p_comp_w = get_num(t, tpath, "p_comp_w", world.terminal.p_comp_w);
    world.terminal.p_idle_w = get_num(t, tpath, "p_idle_w", world.terminal.p_idle_w);
    world.terminal.p_tran_w = get_num(t, tpath, "p_tran_w", world.terminal.p_tran_w);
  }

  if (obj.contains("radio")) {
    const json& r = obj.at("radio");
    const std::string rpath = path + ".radio";
    check_keys(r, rpath, {"bandwidth_hz", "noise_power_w", "pathloss_exponent", "reference_gain"});
    world.radio.bandwidth_hz = get_num(r, rpath, "bandwidth_hz", world.radio.bandwidth_hz);
    world.radio.noise_power_w = get_num(r, rpath, "noise_power_w", world.radio.noise_power_w);
    world.radio.pathloss_exponent = get_num(r, rpath, "pathloss_exponent", world.radio.pathloss_exponent);
    world.radio.reference_gain = get_num(r, rpath, "reference_gain", world.radio.reference_gain);
  }

  if (obj.contains("tasks")) {
    const json& t = obj.at("tasks");
    const std::string tpath = path + ".tasks";
    check_keys(t, tpath, {"gen_prob", "size_min_bits", "size_max_bits", "priority_min", "priority_max"});
    world.tasks.gen_prob = get_num(t, tpath, "gen_prob", world.tasks.gen_prob);
    world.tasks.size_min_bits = get_num(t, tpath, "size_min_bits", world.tasks.size_min_bits);
    world.tasks.size_max_bits = get_num(t, tpath, "size_max_bits", world.tasks.size_max_bits);
    world.tasks.priority_min = get_int(t, tpath, "priority_min", world.tasks.priority_min);
    world.tasks.priority_max = get_int(t, tpath, "priority_max", world.tasks.priority_max);
  }
}

void parse_agent(const json& obj, const std::string& path, AgentConfig& agent) {
  check_keys(obj, path,
             {"gamma", "epsilon_start", "epsilon_min", "epsilon_decay", "learning_rate",
              "batch_size", "buffer_capacity", "target_sync_period", "train_period",
              "base_reward", "hidden_sizes", "norm_size_bits", "norm_priority",
              "rho_input_floor"});
  agent.gamma = get_num(obj, path, "gamma", agent.gamma);
  agent.epsilon_start = get_num(obj, path, "epsilon_start", agent.epsilon_start);
  agent.epsilon_min = get_num(obj, path, "epsilon_min", agent.epsilon_min);
  agent.epsilon_decay = get_num(obj, path, "epsilon_decay", agent.epsilon_decay);
  agent.learning_rate = get_num(obj, path, "learning_rate", agent.learning_rate);
  agent.batch_size = get_int(obj, path, "batch_size", agent.batch_size);
  agent.buffer_capacity = get_int(obj, path, "buffer_capacity", agent.buffer_capacity);
  agent.target_sync_period = get_int(obj, path, "target_sync_period", agent.target_sync_period);
  agent.train_period = get_int(obj, path, "train_period", agent.train_period);
  agent.base_reward = get_num(obj, path, "base_reward", agent.base_reward);
  agent.norm_size_bits = get_num(obj, path, "norm_size_bits", agent.norm_size_bits);
  agent.norm_priority = get_num(obj, path, "norm_priority", agent.norm_priority);
  agent.rho_input_floor = get_num(obj, path, "rho_input_floor", agent.rho_input_floor);
  if (obj.contains("hidden_sizes")) {
    const json& h = obj.at("hidden_sizes");
    if (!h.is_array() || h.empty()) throw ConfigError(path + ".hidden_sizes: expected a nonempty array");
    agent.hidden_sizes.clear();
    for (const json& e : h) {
      if (!e.is_number_integer()) throw ConfigError(path + ".hidden_sizes: expected integers");
      agent.hidden_sizes.push_back(e.get<int>());
    }
  }
}

void parse_run(const json& obj, const std::string& path, ExperimentSpec& spec) {
  check_keys(obj, path,
             {"policy", "episodes", "eval_seeds", "depth", "checkpoint_dir", "compare_policies",
              "sweep", "hyper_sweep"});
  if (obj.contains("policy")) spec.policy = parse_policy(get_str(obj, path, "policy", ""));
  spec.episodes = get_int(obj, path, "episodes", spec.episodes);
  spec.eval_seeds = get_int(obj, path, "eval_seeds", spec.eval_seeds);
  spec.depth = get_int(obj, path, "depth", spec.depth);
  spec.checkpoint_dir = get_str(obj, path, "checkpoint_dir", spec.checkpoint_dir);

  if (obj.contains("compare_policies")) {
    const json& list = obj.at("compare_policies");
    if (!list.is_array() || list.empty()) {
      throw ConfigError(path + ".compare_policies: expected a nonempty array");
    }
    spec.compare_policies.clear();
    for (const json& e : list) {
      if (!e.is_string()) throw ConfigError(path + ".compare_policies: expected policy tags");
      spec.compare_policies.push_back(parse_policy(e.get<std::string>()));
    }
  }

  if (obj.contains("sweep")) {
    const json& s = obj.at("sweep");
    const std::string spath = path + ".sweep";
    check_keys(s, spath, {"axis", "values"});
    SweepSpec sweep;
    const std::string axis = get_str(s, spath, "axis", "");
    if (axis == "terminals") {
      sweep.axis = SweepAxis::terminals;
    } else if (axis == "speed") {
      sweep.axis = SweepAxis::speed;
    } else {
      throw ConfigError(spath + ".axis: expected \"terminals\" or \"speed\"");
    }
    sweep.values = get_num_list(s, spath, "values");
    spec.sweep = sweep;
  }

  if (obj.contains("hyper_sweep")) {
    const json& h = obj.at("hyper_sweep");
    const std::string hpath = path + ".hyper_sweep";
    check_keys(h, hpath, {"axis", "values"});
    HyperSweepSpec hyper;
    const std::string axis = get_str(h, hpath, "axis", "");
    if (axis == "learning_rate") {
      hyper.axis = HyperAxis::learning_rate;
    } else if (axis == "batch_size") {
      hyper.axis = HyperAxis::batch_size;
    } else {
      throw ConfigError(hpath + ".axis: expected \"learning_rate\" or \"batch_size\"");
    }
    hyper.values = get_num_list(h, hpath, "values");
    spec.hyper_sweep = hyper;
  }
}

void validate_agent(const AgentConfig& agent) {
  auto fail = [](const std::string& what) { throw ConfigError("agent config: " + what); };
  if (agent.gamma < 0.0 || agent.gamma >= 1.0) fail("gamma must be in [0, 1)");
  if (agent.epsilon_start < 0.0 || agent.epsilon_start > 1.0) fail("epsilon_start must be in [0, 1]");
  if (agent.epsilon_min < 0.0 || agent.epsilon_min > agent.epsilon_start) {
    fail("epsilon_min must be in [0, epsilon_start]");
  }
  if (agent.epsilon_decay <= 0.0 || agent.epsilon_decay > 1.0) fail("epsilon_decay must be in (0, 1]");
  if (agent.learning_rate <= 0.0) fail("learning_rate must be > 0");
  if (agent.batch_size < 1) fail("batch_size must be >= 1");
  if (agent.buffer_capacity < 1) fail("buffer_capacity must be >= 1");
  if (agent.target_sync_period < 1) fail("target_sync_period must be >= 1");
  if (agent.train_period < 1) fail("train_period must be >= 1");
  if (agent.base_reward <= 0.0) fail("base_reward must be > 0");
  if (agent.norm_size_bits <= 0.0 || agent.norm_priority <= 0.0) fail("norm constants must be > 0");
  if (agent.rho_input_floor > 1.0) fail("rho_input_floor must be <= 1");
  for (int h : agent.hidden_sizes) {
    if (h < 1) fail("hidden_sizes must be positive");
  }
}

}  // namespace

ExperimentSpec default_spec() {
  ExperimentSpec spec;
  spec.world = default_world_config();
  return spec;
}

ExperimentSpec parse_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(root, "config", {"version", "world", "agent", "run"});

  const int version = get_int(root, "config", "version", 1);
  if (version != 1) throw ConfigError("config.version: only version 1 is supported");

  ExperimentSpec spec = default_spec();
  if (root.contains("world")) parse_world(root.at("world"), "config.world", spec.world);
  if (root.contains("agent")) parse_agent(root.at("agent"), "config.agent", spec.agent);
  if (root.contains("run")) parse_run(root.at("run"), "config.run", spec);

  spec.world.validate();
  validate_agent(spec.agent);
  if (spec.episodes < 0) throw ConfigError("config.run.episodes: must be >= 0");
  if (spec.eval_seeds < 1) throw ConfigError("config.run.eval_seeds: must be >= 1");
  if (spec.depth < 1) throw ConfigError("config.run.depth: must be >= 1");
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_spec(buffer.str());
}

std::string spec_to_json(const ExperimentSpec& spec) {
  json root;
  root["version"] = 1;

  json world;
  world["num_terminals"] = spec.world.num_terminals;
  world["num_servers"] = spec.world.num_servers;
  world["total_slots"] = spec.world.total_slots;
  world["slot_s"] = spec.world.slot_s;
  world["arena"] = {{"width_m", spec.world.arena_width_m}, {"height_m", spec.world.arena_height_m}};
  json servers = json::array();
  for (const ServerPlacement& s : spec.world.servers) {
    servers.push_back({{"x_m", s.x_m},
                       {"y_m", s.y_m},
                       {"coverage_radius_m", s.profile.coverage_radius_m},
                       {"cpu_hz", s.profile.cpu_hz},
                       {"bits_per_cycle", s.profile.bits_per_cycle}});
  }
  world["servers"] = servers;
  world["terminal_profile"] = {{"cpu_hz", spec.world.terminal.cpu_hz},
                               {"bits_per_cycle", spec.world.terminal.bits_per_cycle},
                               {"p_comp_w", spec.world.terminal.p_comp_w},
                               {"p_idle_w", spec.world.terminal.p_idle_w},
                               {"p_tran_w", spec.world.terminal.p_tran_w}};
  world["radio"] = {{"bandwidth_hz", spec.world.radio.bandwidth_hz},
                    {"noise_power_w", spec.world.radio.noise_power_w},
                    {"pathloss_exponent", spec.world.radio.pathloss_exponent},
                    {"reference_gain", spec.world.radio.reference_gain}};
  world["lambda"] = spec.world.lambda;
  world["alpha0"] = spec.world.alpha0;
  world["speed_min_mps"] = spec.world.speed_min_mps;
  world["speed_max_mps"] = spec.world.speed_max_mps;
  world["tasks"] = {{"gen_prob", spec.world.tasks.gen_prob},
                    {"size_min_bits", spec.world.tasks.size_min_bits},
                    {"size_max_bits", spec.world.tasks.size_max_bits},
                    {"priority_min", spec.world.tasks.priority_min},
                    {"priority_max", spec.world.tasks.priority_max}};
  root["world"] = world;

  json agent;
  agent["gamma"] = spec.agent.gamma;
  agent["epsilon_start"] = spec.agent.epsilon_start;
  agent["epsilon_min"] = spec.agent.epsilon_min;
  agent["epsilon_decay"] = spec.agent.epsilon_decay;
  agent["learning_rate"] = spec.agent.learning_rate;
  agent["batch_size"] = spec.agent.batch_size;
  agent["buffer_capacity"] = spec.agent.buffer_capacity;
  agent["target_sync_period"] = spec.agent.target_sync_period;
  agent["train_period"] = spec.agent.train_period;
  agent["base_reward"] = spec.agent.base_reward;
  agent["hidden_sizes"] = spec.agent.hidden_sizes;
  agent["norm_size_bits"] = spec.agent.norm_size_bits;
  agent["norm_priority"] = spec.agent.norm_priority;
  agent["rho_input_floor"] = spec.agent.rho_input_floor;
  root["agent"] = agent;

  json run;
  run["policy"] = to_string(spec.policy);
  run["episodes"] = spec.episodes;
  run["eval_seeds"] = spec.eval_seeds;
  run["depth"] = spec.depth;
  // checkpoint_dir is a filesystem location, not part of the experiment
  // identity, so it stays out of the canonical form and the hash
  json compare = json::array();
  for (PolicyKind kind : spec.compare_policies) compare.push_back(to_string(kind));
  run["compare_policies"] = compare;
  if (spec.sweep) {
    run["sweep"] = {{"axis", spec.sweep->axis == SweepAxis::terminals ? "terminals" : "speed"},
                    {"values", spec.sweep->values}};
  }
  if (spec.hyper_sweep) {
    run["hyper_sweep"] = {
        {"axis",
         spec.hyper_sweep->axis == HyperAxis::learning_rate ? "learning_rate" : "batch_size"},
        {"values", spec.hyper_sweep->values}};
  }
  root["run"] = run;

  return root.dump();
}

uint64_t config_hash(const ExperimentSpec& spec) {
  const std::string text = spec_to_json(spec);
  uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

WorldConfig apply_sweep_point(const WorldConfig& base, SweepAxis axis, double value) {
  WorldConfig world = base;
  if (axis == SweepAxis::terminals) {
    world.num_terminals = static_cast<int>(value);
  } else {
    world.speed_min_mps = value;
    world.speed_max_mps = value;
  }
  return world;
}

}  // namespace edgesim
