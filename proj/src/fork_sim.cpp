#include "wbc/fork_sim.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "wbc/csv.hpp"
#include "wbc/rng.hpp"

namespace wbc {

Topology generate_topology(int z, double p_l, uint64_t seed) {
  if (z < 2) throw std::invalid_argument("z: must be >= 2");
  if (!(p_l >= 0.0 && p_l <= 1.0)) throw std::invalid_argument("p_l: must be in [0, 1]");
  Topology top;
  top.node_count = z;
  top.adj.assign(static_cast<std::size_t>(z), {});
  Rng rng(seed, /*stream=*/0x746f706fULL);  // "topo"
  for (uint32_t i = 0; i + 1 < static_cast<uint32_t>(z); ++i) {
    for (uint32_t j = i + 1; j < static_cast<uint32_t>(z); ++j) {
      if (rng.uniform01() < p_l) {
        top.adj[i].push_back(j);
        top.adj[j].push_back(i);
        ++top.edge_count;
      }
    }
  }
  return top;
}

RaceOutcome run_fork_race(const Topology& top, uint32_t origin_i,
                          uint32_t origin_j, uint64_t seed) {
  const auto z = static_cast<uint32_t>(top.node_count);
  if (origin_i >= z || origin_j >= z)
    throw std::invalid_argument("origin: node out of range");
  if (origin_i == origin_j)
    throw std::invalid_argument("origin: origins must be distinct");

  // 0 = uninformed, 1 = holds block i, 2 = holds block j.
  std::vector<uint8_t> state(z, 0);
  state[origin_i] = 1;
  state[origin_j] = 2;

  // The coin is label-invariant: heads adopts the block whose origin has the
  // smaller node id. Swapping the origin arguments therefore mirrors the
  // outcome exactly for the same seed.
  const uint8_t low_label = origin_i < origin_j ? 1 : 2;
  const uint8_t high_label = origin_i < origin_j ? 2 : 1;

  std::vector<uint32_t> uninformed;
  uninformed.reserve(z);
  for (uint32_t v = 0; v < z; ++v)
    if (state[v] == 0) uninformed.push_back(v);

  Rng coin(seed, /*stream=*/0x72616365ULL);  // "race"
  int rounds = 0;
  std::vector<std::pair<uint32_t, uint8_t>> adoptions;
  while (!uninformed.empty()) {
    adoptions.clear();
    for (uint32_t v : uninformed) {
      bool sees_i = false;
      bool sees_j = false;
      for (uint32_t u : top.adj[v]) {
        if (state[u] == 1) sees_i = true;
        else if (state[u] == 2) sees_j = true;
        if (sees_i && sees_j) break;
      }
      if (sees_i && sees_j) {
        adoptions.emplace_back(v, coin.uniform01() < 0.5 ? low_label : high_label);
      } else if (sees_i) {
        adoptions.emplace_back(v, 1);
      } else if (sees_j) {
        adoptions.emplace_back(v, 2);
      }
    }
    if (adoptions.empty()) break;  // remaining nodes are unreachable
    for (auto [v, lbl] : adoptions) state[v] = lbl;
    std::erase_if(uninformed, [&](uint32_t v) { return state[v] != 0; });
    ++rounds;
  }

  RaceOutcome out;
  out.rounds = rounds;
  for (uint32_t v = 0; v < z; ++v) {
    if (state[v] == 1) ++out.adopters_i;
    else if (state[v] == 2) ++out.adopters_j;
  }
  if (out.adopters_i > out.adopters_j) out.winner = Winner::block_i;
  else if (out.adopters_j > out.adopters_i) out.winner = Winner::block_j;
  else out.winner = Winner::tie;
  return out;
}

PcEstimate estimate_pc(int z, double p_l, long trials_per_bucket, uint64_t seed,
                       int buckets) {
  if (trials_per_bucket < 1)
    throw std::invalid_argument("trials_per_bucket: must be >= 1");
  if (buckets < 1) throw std::invalid_argument("buckets: must be >= 1");

  PcEstimate est;
  for (int k = 0; k < buckets; ++k) {
    const double lo = static_cast<double>(k) / buckets;
    const double hi = static_cast<double>(k + 1) / buckets;
    const bool last = k == buckets - 1;

    long run = 0;
    double wins = 0.0;
    double c_norm_sum = 0.0;
    for (long t = 0; t < trials_per_bucket; ++t) {
      const uint64_t trial_key =
          mix64(seed ^ mix64((static_cast<uint64_t>(k) << 32) | static_cast<uint64_t>(t)));
      Topology top = generate_topology(z, p_l, trial_key);

      std::vector<uint32_t> eligible;
      for (uint32_t v = 0; v < static_cast<uint32_t>(z); ++v) {
        const double cn = static_cast<double>(top.degree(v)) / (z - 1);
        if (cn >= lo && (cn < hi || (last && cn <= hi))) eligible.push_back(v);
      }
      if (eligible.empty()) continue;

      Rng pick(trial_key, /*stream=*/0x7069636bULL);  // "pick"
      const uint32_t origin_i = eligible[pick.below(eligible.size())];
      uint32_t origin_j = static_cast<uint32_t>(pick.below(static_cast<uint64_t>(z) - 1));
      if (origin_j >= origin_i) ++origin_j;

      const RaceOutcome out = run_fork_race(top, origin_i, origin_j, trial_key);
      if (out.winner == Winner::block_i) wins += 1.0;
      else if (out.winner == Winner::tie) wins += 0.5;
      c_norm_sum += static_cast<double>(top.degree(origin_i)) / (z - 1);
      ++run;
    }

    if (run == 0) {
      est.skipped_buckets.push_back(k);
      continue;
    }
    PcSample s;
    s.z = z;
    s.p_l = p_l;
    s.c_norm = c_norm_sum / static_cast<double>(run);
    s.trials = run;
    s.wins = wins;
    s.p_c_hat = wins / static_cast<double>(run);
    est.samples.push_back(s);
  }
  std::sort(est.samples.begin(), est.samples.end(),
            [](const PcSample& a, const PcSample& b) { return a.c_norm < b.c_norm; });
  return est;
}

void write_pc_samples_csv(std::ostream& os, const std::vector<PcSample>& samples) {
  os << "z,p_l,c_norm,trials,wins,p_c_hat\n";
  for (const auto& s : samples) {
    os << s.z << ',' << csv_num(s.p_l) << ',' << csv_num(s.c_norm) << ','
       << s.trials << ',' << csv_num(s.wins) << ',' << csv_num(s.p_c_hat) << '\n';
  }
}

std::vector<PcSample> read_pc_samples_csv(std::istream& is) {
  std::vector<PcSample> samples;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("pc samples csv: empty input");
  if (line != "z,p_l,c_norm,trials,wins,p_c_hat")
    throw std::runtime_error("pc samples csv: unexpected header: " + line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    PcSample s;
    auto next = [&]() -> std::string {
      if (!std::getline(ss, field, ','))
        throw std::runtime_error("pc samples csv: short row: " + line);
      return field;
    };
    s.z = std::stoi(next());
    s.p_l = std::stod(next());
    s.c_norm = std::stod(next());
    s.trials = std::stol(next());
    s.wins = std::stod(next());
    s.p_c_hat = std::stod(next());
    samples.push_back(s);
  }
  return samples;
}

}  // namespace wbc
