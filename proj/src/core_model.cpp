#include "wbc/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace wbc {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

}  // namespace

void validate(const NetworkParams& net) {
  if (net.z < 2) fail("network.z", "must be >= 2");
  if (!(net.p_l > 0.0 && net.p_l <= 1.0)) fail("network.p_l", "must be in (0, 1]");
  if (!(net.tau > 0.0)) fail("network.tau", "must be > 0");
  if (!(net.block_size > 0.0)) fail("network.block_size", "must be > 0");
  if (!(net.rate > 0.0)) fail("network.rate", "must be > 0");
  if (!(net.fork_prob >= 0.0 && net.fork_prob <= 1.0))
    fail("network.fork_prob", "must be in [0, 1]");
  if (!(net.mean_hash > 0.0)) fail("network.mean_hash", "must be > 0");
}

void validate(const ChannelParams& ch) {
  if (!(ch.bandwidth > 0.0)) fail("channel.bandwidth", "must be > 0");
  if (!(ch.noise_power > 0.0)) fail("channel.noise_power", "must be > 0");
  if (!(ch.fading_scale > 0.0)) fail("channel.fading_scale", "must be > 0");
}

void validate(const EconParams& econ) {
  if (!(econ.theta > 1.0)) fail("econ.theta", "must be > 1");
  if (!(econ.epsilon > 0.0)) fail("econ.epsilon", "must be > 0");
  if (!(econ.gamma > 0.0)) fail("econ.gamma", "must be > 0");
}

void validate(const FitParams& fit) {
  if (!(fit.beta3 > 0.0)) fail("fit.beta3", "must be > 0");
  if (!std::isfinite(fit.beta1) || !std::isfinite(fit.beta2))
    fail("fit.beta1/beta2", "must be finite");
}

void validate(const Capability& cap, const NetworkParams& net) {
  if (!(cap.hash_power > 0.0)) fail("capability.hash_power", "must be > 0");
  if (!(cap.connectivity >= 1.0)) fail("capability.connectivity", "must be >= 1");
  if (!(cap.connectivity <= net.z - 1))
    fail("capability.connectivity", "must be <= z - 1");
  if (!(cap.tx_power > 0.0)) fail("capability.tx_power", "must be > 0");
}

double normalized_connectivity(double c, int z) {
  if (z < 2) fail("z", "must be >= 2");
  return c / static_cast<double>(z - 1);
}

double energy_per_block(const Capability& cap, const NetworkParams& net) {
  return cap.hash_power * net.tau +
         (net.block_size / net.rate) * cap.tx_power * cap.connectivity;
}

double hash_confirm_prob(double h_i, const NetworkParams& net) {
  if (net.z < 2) fail("network.z", "must be >= 2");
  if (!(h_i > 0.0)) fail("h_i", "must be > 0");
  if (!(net.mean_hash > 0.0)) fail("network.mean_hash", "must be > 0");
  return (0.5 * (net.z - 2) * net.mean_hash + h_i) / (net.z * net.mean_hash);
}

double outage_prob(double p, const ChannelParams& ch, double rate) {
  if (!(p > 0.0)) fail("p", "must be > 0");
  if (!(rate > 0.0)) fail("rate", "must be > 0");
  const double delta = rate / ch.bandwidth;
  const double rho = p / ch.noise_power;
  const double x = std::expm1(delta * std::numbers::ln2) / (rho * ch.fading_scale);
  return -std::expm1(-x);
}

double connectivity_confirm_prob(double c_norm, const FitParams& fit) {
  if (!(c_norm + fit.beta3 > 0.0)) fail("c_norm", "c_norm + beta3 must be > 0");
  const double raw = fit.beta1 - fit.beta2 * std::log(c_norm + fit.beta3);
  return std::clamp(raw, 0.0, 1.0);
}

double total_confirm_prob(const Capability& cap, const NetworkParams& net,
                          const ChannelParams& ch, const FitParams& fit) {
  const double p_h = hash_confirm_prob(cap.hash_power, net);
  const double p_out = outage_prob(cap.tx_power, ch, net.rate);
  const double c_norm = normalized_connectivity(cap.connectivity, net.z);
  const double p_c = connectivity_confirm_prob(c_norm, fit);
  return (net.fork_prob * p_h + (1.0 - net.fork_prob)) * p_c * (1.0 - p_out);
}

double energy_cost_coeff(const Capability& cap, const NetworkParams& net,
                         const EconParams& econ) {
  return econ.gamma * energy_per_block(cap, net);
}

double device_utility(double lambda, double unit_bonus, double salary,
                      const EconParams& econ) {
  return lambda * unit_bonus * unit_bonus - (econ.theta - 1.0) * salary;
}

double optimal_block_count(double g, double f, double unit_bonus) {
  if (!(unit_bonus >= 0.0)) fail("unit_bonus", "must be >= 0");
  return g * unit_bonus / f;
}

double type_lambda(double g, double f) {
  if (!(f > 0.0)) fail("f", "must be > 0");
  return g * g / (2.0 * f);
}

double type_lambda(const Capability& cap, const NetworkParams& net,
                   const ChannelParams& ch, const FitParams& fit,
                   const EconParams& econ) {
  return type_lambda(total_confirm_prob(cap, net, ch, fit),
                     energy_cost_coeff(cap, net, econ));
}

}  // namespace wbc
