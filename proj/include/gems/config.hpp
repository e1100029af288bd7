#ifndef GEMS_CONFIG_HPP
#define GEMS_CONFIG_HPP

#include <cstdint>
#include <string>

#include "json.hpp"

#include "gems/instance.hpp"
#include "gems/simulation.hpp"

namespace gems {

using Json = nlohmann::ordered_json;

// Parsed experiment description. `canonical` is the schema-complete echo
// of the input (defaults materialized, fixed key order) and is what the
// config hash and report headers are computed from.
struct ExperimentConfig {
  Instance instance;
  AlgorithmSpec algo;
  bool has_algorithm = false;  // instance-only configs may omit the block
  int trials = 100;
  std::uint64_t seed = 0;
  NoiseSpec noise;
  AlgoOptions opts;
  std::string out;
  bool trace = false;
  Json canonical;
};

// Instance sub-schema: either {"generator": "hard"|"unverifiable", ...}
// or explicit {"arms", "targets"?, "theta" | "rewards"+"target_rewards"?,
// "intrinsic_dim"?}. Omitted targets means the targets are the arms.
Instance parse_instance(const Json& j);

// Full schema; unknown keys anywhere are rejected.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);

std::uint64_t fnv1a(const std::string& s);
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string config_hash_hex(const ExperimentConfig& cfg);

}  // namespace gems

#endif
