#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wbc/contract.hpp"
#include "wbc/core_model.hpp"

// Run configuration: one flat JSON document validated field by field before
// any run starts. Defaults match the study's default parameter table. The
// canonical serialization is hashed so every artifact can be traced back to
// the exact configuration that produced it.

namespace wbc {

struct TypingConfig {
  TypingMode mode = TypingMode::grid;
  int num_types = 48;
  // population_size == 0 uses the capability lattice itself with uniform
  // mass; > 0 samples capabilities uniformly from the ranges below.
  long population_size = 0;
  double h_min = 10.0, h_max = 15.0;
  double c_min = 1.0, c_max = 20.0;
  double p_min = 5.0, p_max = 20.0;
};

struct SimulationConfig {
  long trials = 2000;
  int buckets = 20;
  uint64_t seed = 42;
};

struct SweepConfig {
  double epsilon_min = 100.0;
  double epsilon_max = 550.0;
  double epsilon_step = 50.0;
  std::vector<int> z_list = {100, 200, 300};
  std::vector<double> p_l_list = {0.1, 0.2, 0.3, 0.4};
};

struct RunConfig {
  NetworkParams network;
  ChannelParams channel;
  EconParams econ;
  TypingConfig typing;
  SimulationConfig simulation;
  SweepConfig sweep;
  std::string out_dir = "out";
};

RunConfig default_config();

// Parse + validate; throws std::invalid_argument with a field-level message.
RunConfig config_from_json_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_json_text(const RunConfig& config);
void validate(const RunConfig& config);

// FNV-1a over the canonical JSON serialization, as 16 hex digits.
std::string config_hash(const RunConfig& config);

// Default-parameter connectivity model (the shipped sign-corrected fit).
FitParams default_fit_params();

// Build the device population implied by the typing config (deterministic in
// the seed) and convert it to sorted types.
std::vector<Capability> build_population(const RunConfig& config);
std::vector<TypeProfile> types_from_config(const RunConfig& config,
                                           const FitParams& fit);

// JSON run manifest: seed, config hash, toolkit version, command, artifacts.
void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& config,
                    const std::vector<std::string>& artifacts);

}  // namespace wbc
