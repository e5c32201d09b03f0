#include "wbc/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wbc/rng.hpp"
#include "wbc/version.hpp"

namespace wbc {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& j, const char* section, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string(section) + "." + key +
                                ": wrong type");
  }
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

FitParams default_fit_params() { return FitParams{}; }

void validate(const RunConfig& config) {
  validate(config.network);
  validate(config.channel);
  validate(config.econ);
  if (config.typing.num_types < 1)
    throw std::invalid_argument("typing.num_types: must be >= 1");
  if (config.typing.population_size < 0)
    throw std::invalid_argument("typing.population_size: must be >= 0");
  if (!(config.typing.h_min > 0.0 && config.typing.h_max >= config.typing.h_min))
    throw std::invalid_argument("typing.h_range: must satisfy 0 < min <= max");
  if (!(config.typing.c_min >= 1.0 && config.typing.c_max >= config.typing.c_min))
    throw std::invalid_argument("typing.c_range: must satisfy 1 <= min <= max");
  if (!(config.typing.c_max <= config.network.z - 1))
    throw std::invalid_argument("typing.c_range: max must be <= z - 1");
  if (!(config.typing.p_min > 0.0 && config.typing.p_max >= config.typing.p_min))
    throw std::invalid_argument("typing.p_range: must satisfy 0 < min <= max");
  if (config.simulation.trials < 1)
    throw std::invalid_argument("simulation.trials: must be >= 1");
  if (config.simulation.buckets < 1)
    throw std::invalid_argument("simulation.buckets: must be >= 1");
  if (!(config.sweep.epsilon_min > 0.0))
    throw std::invalid_argument("sweep.epsilon_min: must be > 0");
  if (!(config.sweep.epsilon_max >= config.sweep.epsilon_min))
    throw std::invalid_argument("sweep.epsilon_max: must be >= epsilon_min");
  if (!(config.sweep.epsilon_step > 0.0))
    throw std::invalid_argument("sweep.epsilon_step: must be > 0");
  for (int z : config.sweep.z_list)
    if (z < 2) throw std::invalid_argument("sweep.z_list: entries must be >= 2");
  for (double p : config.sweep.p_l_list)
    if (!(p > 0.0 && p <= 1.0))
      throw std::invalid_argument("sweep.p_l_list: entries must be in (0, 1]");
  if (config.out_dir.empty())
    throw std::invalid_argument("out_dir: must be nonempty");
}

RunConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig c;
  if (j.contains("network")) {
    const auto& n = j["network"];
    read_field(n, "network", "z", c.network.z);
    read_field(n, "network", "p_l", c.network.p_l);
    read_field(n, "network", "tau", c.network.tau);
    read_field(n, "network", "block_size", c.network.block_size);
    read_field(n, "network", "rate", c.network.rate);
    read_field(n, "network", "fork_prob", c.network.fork_prob);
    read_field(n, "network", "mean_hash", c.network.mean_hash);
  }
  if (j.contains("channel")) {
    const auto& n = j["channel"];
    read_field(n, "channel", "bandwidth", c.channel.bandwidth);
    read_field(n, "channel", "noise_power", c.channel.noise_power);
    read_field(n, "channel", "fading_scale", c.channel.fading_scale);
  }
  if (j.contains("econ")) {
    const auto& n = j["econ"];
    read_field(n, "econ", "theta", c.econ.theta);
    read_field(n, "econ", "epsilon", c.econ.epsilon);
    read_field(n, "econ", "gamma", c.econ.gamma);
  }
  if (j.contains("typing")) {
    const auto& n = j["typing"];
    std::string mode = "grid";
    read_field(n, "typing", "mode", mode);
    if (mode == "grid") c.typing.mode = TypingMode::grid;
    else if (mode == "quantile") c.typing.mode = TypingMode::quantile;
    else throw std::invalid_argument("typing.mode: must be \"grid\" or \"quantile\"");
    read_field(n, "typing", "num_types", c.typing.num_types);
    read_field(n, "typing", "population_size", c.typing.population_size);
    read_field(n, "typing", "h_min", c.typing.h_min);
    read_field(n, "typing", "h_max", c.typing.h_max);
    read_field(n, "typing", "c_min", c.typing.c_min);
    read_field(n, "typing", "c_max", c.typing.c_max);
    read_field(n, "typing", "p_min", c.typing.p_min);
    read_field(n, "typing", "p_max", c.typing.p_max);
  }
  if (j.contains("simulation")) {
    const auto& n = j["simulation"];
    read_field(n, "simulation", "trials", c.simulation.trials);
    read_field(n, "simulation", "buckets", c.simulation.buckets);
    read_field(n, "simulation", "seed", c.simulation.seed);
  }
  if (j.contains("sweep")) {
    const auto& n = j["sweep"];
    read_field(n, "sweep", "epsilon_min", c.sweep.epsilon_min);
    read_field(n, "sweep", "epsilon_max", c.sweep.epsilon_max);
    read_field(n, "sweep", "epsilon_step", c.sweep.epsilon_step);
    read_field(n, "sweep", "z_list", c.sweep.z_list);
    read_field(n, "sweep", "p_l_list", c.sweep.p_l_list);
  }
  read_field(j, "config", "out_dir", c.out_dir);
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const RunConfig& c) {
  json j;
  j["network"] = {{"z", c.network.z},
                  {"p_l", c.network.p_l},
                  {"tau", c.network.tau},
                  {"block_size", c.network.block_size},
                  {"rate", c.network.rate},
                  {"fork_prob", c.network.fork_prob},
                  {"mean_hash", c.network.mean_hash}};
  j["channel"] = {{"bandwidth", c.channel.bandwidth},
                  {"noise_power", c.channel.noise_power},
                  {"fading_scale", c.channel.fading_scale}};
  j["econ"] = {{"theta", c.econ.theta},
               {"epsilon", c.econ.epsilon},
               {"gamma", c.econ.gamma}};
  j["typing"] = {{"mode", c.typing.mode == TypingMode::grid ? "grid" : "quantile"},
                 {"num_types", c.typing.num_types},
                 {"population_size", c.typing.population_size},
                 {"h_min", c.typing.h_min},
                 {"h_max", c.typing.h_max},
                 {"c_min", c.typing.c_min},
                 {"c_max", c.typing.c_max},
                 {"p_min", c.typing.p_min},
                 {"p_max", c.typing.p_max}};
  j["simulation"] = {{"trials", c.simulation.trials},
                     {"buckets", c.simulation.buckets},
                     {"seed", c.simulation.seed}};
  j["sweep"] = {{"epsilon_min", c.sweep.epsilon_min},
                {"epsilon_max", c.sweep.epsilon_max},
                {"epsilon_step", c.sweep.epsilon_step},
                {"z_list", c.sweep.z_list},
                {"p_l_list", c.sweep.p_l_list}};
  j["out_dir"] = c.out_dir;
  return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& config) {
  const std::string text = config_to_json_text(config);
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<Capability> build_population(const RunConfig& config) {
  if (config.typing.population_size == 0) return default_capability_grid();
  std::vector<Capability> population;
  population.reserve(static_cast<std::size_t>(config.typing.population_size));
  Rng rng(config.simulation.seed, /*stream=*/0x706f7075ULL);  // "popu"
  for (long i = 0; i < config.typing.population_size; ++i) {
    Capability cap;
    cap.hash_power = rng.uniform(config.typing.h_min, config.typing.h_max);
    cap.connectivity = rng.uniform(config.typing.c_min, config.typing.c_max);
    cap.tx_power = rng.uniform(config.typing.p_min, config.typing.p_max);
    population.push_back(cap);
  }
  return population;
}

std::vector<TypeProfile> types_from_config(const RunConfig& config,
                                           const FitParams& fit) {
  return build_types(build_population(config), config.typing.num_types,
                     config.typing.mode, config.network, config.channel, fit,
                     config.econ);
}

void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& config,
                    const std::vector<std::string>& artifacts) {
  json j;
  j["command"] = command;
  j["config_hash"] = config_hash(config);
  j["seed"] = config.simulation.seed;
  j["version"] = kVersion;
  j["artifacts"] = nlohmann::json::array();
  for (const auto& a : artifacts)
    j["artifacts"].push_back(std::filesystem::path(a).filename().string());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("manifest: cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace wbc
