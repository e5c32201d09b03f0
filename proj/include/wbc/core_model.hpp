#pragma once

#include <stdexcept>

// Closed-form physical and economic model of a wireless blockchain network:
// per-block energy, fork/outage/connectivity confirmation probabilities, the
// device utility at its optimal effort, and the scalar preference order that
// collapses a (hash power, connectivity, transmission power) capability into
// a single type.

namespace wbc {

// A device's capability triple.
//   hash_power    energy per unit time spent hashing (h > 0)
//   connectivity  raw neighbor count, dimensionless (c >= 1, c <= Z-1)
//   tx_power      transmission power (p > 0)
struct Capability {
  double hash_power = 0.0;
  double connectivity = 0.0;
  double tx_power = 0.0;
};

// Network-wide constants.
struct NetworkParams {
  int z = 100;             // device count, >= 2
  double p_l = 0.2;        // average link probability, (0, 1]
  double tau = 600.0;      // average block interval
  double block_size = 1000.0;  // bits (a)
  double rate = 2000.0;        // transmission rate, bits/time (r)
  double fork_prob = 0.5;      // P_F in [0, 1]
  double mean_hash = 12.5;     // population mean hash power
};

struct ChannelParams {
  double bandwidth = 2e6;      // Hz
  double noise_power = 3.98e-3;
  double fading_scale = 1.0;   // sigma^2 of the exponential fading law
};

struct EconParams {
  double theta = 1.5;    // time cost coefficient, > 1
  double epsilon = 400;  // yield coefficient, > 0
  double gamma = 1e-4;   // energy cost coefficient, > 0
};

// Parameters of the logarithmic connectivity->confirmation model
//   P_c(c) = beta1 - beta2 * ln(c + beta3)
// together with the (Z, P_l) context they were fitted under. beta2 is stored
// signed; the evaluation is literal, so an increasing curve needs beta2 < 0.
struct FitParams {
  double beta1 = 0.97575;
  double beta2 = -0.03006;
  double beta3 = 0.00411;
  double adj_r_squared = 0.0;
  double rmse = 0.0;
  int z = 100;
  double p_l = 0.2;
};

// Each validate() throws std::invalid_argument naming the offending field.
void validate(const NetworkParams& net);
void validate(const ChannelParams& ch);
void validate(const EconParams& econ);
void validate(const FitParams& fit);
void validate(const Capability& cap, const NetworkParams& net);

// Normalized degree centrality: raw neighbor count -> [0, 1].
double normalized_connectivity(double c, int z);

// Total energy consumed to propose one block: h*tau + (a/r)*p*c.
double energy_per_block(const Capability& cap, const NetworkParams& net);

// Probability that this device's prong wins the hash race after a fork:
// (0.5*(Z-2)*mean_h + h_i) / (Z*mean_h).
double hash_confirm_prob(double h_i, const NetworkParams& net);

// Outage probability of a transmission at power p and target rate:
// 1 - exp(-(2^(rate/B) - 1) / ((p/N0) * sigma^2)). Strictly decreasing in p.
double outage_prob(double p, const ChannelParams& ch, double rate);

// Connectivity-driven confirmation probability, clamped to [0, 1].
// c_norm is normalized degree centrality in (0, 1].
double connectivity_confirm_prob(double c_norm, const FitParams& fit);

// Total confirmation probability G = [P_F*P_h + (1-P_F)] * P_c * (1-P_out).
double total_confirm_prob(const Capability& cap, const NetworkParams& net,
                          const ChannelParams& ch, const FitParams& fit);

// Energy cost coefficient F = gamma * E_b.
double energy_cost_coeff(const Capability& cap, const NetworkParams& net,
                         const EconParams& econ);

// Device utility at its optimal effort: lambda*b^2 - (theta-1)*s.
double device_utility(double lambda, double unit_bonus, double salary,
                      const EconParams& econ);

// Effort level maximizing the raw device utility: e* = g*b/f.
double optimal_block_count(double g, double f, double unit_bonus);

// Preference order lambda = g^2 / (2f).
double type_lambda(double g, double f);

// Lambda composed from a capability and the environment.
double type_lambda(const Capability& cap, const NetworkParams& net,
                   const ChannelParams& ch, const FitParams& fit,
                   const EconParams& econ);

}  // namespace wbc
