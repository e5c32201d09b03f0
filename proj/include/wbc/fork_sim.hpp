#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

// Monte Carlo estimation of the connectivity -> confirmation relationship by
// racing two simultaneously proposed blocks across a random wireless topology.
//
// Model: Erdos-Renyi G(Z, P_l) topologies; synchronous-round gossip with unit
// per-hop delay; a node hearing both blocks in the same round adopts one with
// a fair coin and never switches. Outage is not simulated here; it enters the
// composed confirmation probability analytically, which avoids counting the
// channel twice.

namespace wbc {

struct Topology {
  int node_count = 0;
  std::vector<std::vector<uint32_t>> adj;  // sorted neighbor lists, no self loops
  std::size_t edge_count = 0;

  int degree(uint32_t v) const { return static_cast<int>(adj[v].size()); }
  double mean_degree() const {
    return node_count > 0 ? 2.0 * static_cast<double>(edge_count) / node_count : 0.0;
  }
};

// Each unordered node pair is independently an edge with probability p_l.
// Deterministic for a given (z, p_l, seed).
Topology generate_topology(int z, double p_l, uint64_t seed);

enum class Winner { block_i, block_j, tie };

struct RaceOutcome {
  Winner winner = Winner::tie;
  int adopters_i = 0;  // nodes holding block i, origins included
  int adopters_j = 0;
  int rounds = 0;  // propagation rounds until no reachable node is uninformed
};

// Race the blocks proposed by origin_i and origin_j. The tie coin is applied
// to the physical block of the lower-numbered origin, so swapping the origin
// arguments with the same seed flips the outcome exactly.
RaceOutcome run_fork_race(const Topology& top, uint32_t origin_i,
                          uint32_t origin_j, uint64_t seed);

struct PcSample {
  int z = 0;
  double p_l = 0.0;
  double c_norm = 0.0;  // mean normalized degree of the probed origins
  long trials = 0;
  double wins = 0.0;  // ties count as half a win
  double p_c_hat = 0.0;
};

struct PcEstimate {
  std::vector<PcSample> samples;       // sorted by c_norm
  std::vector<int> skipped_buckets;    // buckets with no eligible origin in any trial
};

// For each normalized-degree bucket, run trials_per_bucket fork races on
// fresh topologies, probing an origin whose degree falls in the bucket
// against a uniformly chosen competitor. Deterministic for a given seed.
PcEstimate estimate_pc(int z, double p_l, long trials_per_bucket, uint64_t seed,
                       int buckets = 20);

// CSV with header `z,p_l,c_norm,trials,wins,p_c_hat`.
void write_pc_samples_csv(std::ostream& os, const std::vector<PcSample>& samples);
std::vector<PcSample> read_pc_samples_csv(std::istream& is);

}  // namespace wbc
