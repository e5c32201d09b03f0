#include "wbc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "wbc/csv.hpp"
#include "wbc/rng.hpp"

namespace wbc {

const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::proposed: return "proposed";
    case Mechanism::adverse_selection_only: return "adverse_selection_only";
    case Mechanism::fixed_pow: return "fixed_pow";
    case Mechanism::perfect_information: return "perfect_information";
  }
  return "unknown";
}

ContractMenu perfect_information_menu(const std::vector<TypeProfile>& types,
                                      const EconParams& econ) {
  validate(econ);
  const double b = econ.epsilon * (econ.theta - 1.0) / (2.0 * econ.theta - 1.0);
  ContractMenu menu;
  menu.items.resize(types.size());
  for (std::size_t i = 0; i < types.size(); ++i) {
    ContractItem& item = menu.items[i];
    item.unit_bonus = b;
    item.salary = types[i].lambda * b * b / (econ.theta - 1.0);
    item.block_count = optimal_block_count(types[i].g, types[i].f, b);
    item.expected_reward = item.salary + b * item.block_count * types[i].g;
  }
  return menu;
}

MechanismResult proposed_result(const std::vector<TypeProfile>& types,
                                const EconParams& econ, int z) {
  const ContractMenu menu = solve(types, econ, z);
  MechanismResult r;
  r.mechanism = Mechanism::proposed;
  r.epsilon = econ.epsilon;
  r.blockchain_utility = menu.blockchain_utility;
  for (std::size_t i = 0; i < types.size(); ++i)
    r.per_type_utilities.push_back(device_utility(
        types[i].lambda, menu.items[i].unit_bonus, menu.items[i].salary, econ));
  return r;
}

MechanismResult perfect_information_result(const std::vector<TypeProfile>& types,
                                           const EconParams& econ, int z) {
  const ContractMenu menu = perfect_information_menu(types, econ);
  MechanismResult r;
  r.mechanism = Mechanism::perfect_information;
  r.epsilon = econ.epsilon;
  r.blockchain_utility = blockchain_utility(menu, types, econ, z);
  r.per_type_utilities.assign(types.size(), 0.0);
  for (std::size_t i = 0; i < types.size(); ++i)
    r.per_type_utilities[i] = device_utility(
        types[i].lambda, menu.items[i].unit_bonus, menu.items[i].salary, econ);
  return r;
}

AdverseSelectionOutcome adverse_selection_only_menu(
    const std::vector<TypeProfile>& types, const EconParams& econ, int z) {
  AdverseSelectionOutcome out;

  // Design against lambda' = 1/(2F): confirmation ignored, so g' = 1.
  std::vector<std::size_t> order(types.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> lambda_p(types.size());
  for (std::size_t i = 0; i < types.size(); ++i)
    lambda_p[i] = type_lambda(1.0, types[i].f);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lambda_p[a] < lambda_p[b]; });

  out.design_index_of_type.assign(types.size(), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    TypeProfile t = types[order[pos]];
    t.index = static_cast<int>(pos) + 1;
    t.lambda = lambda_p[order[pos]];
    t.g = 1.0;
    // f unchanged; lambda' = 1/(2f) holds exactly.
    out.design_types.push_back(t);
    out.design_index_of_type[order[pos]] = static_cast<int>(pos);
  }
  out.design_menu = solve(out.design_types, econ, z);

  // Realized outcome: each device signs its design item, then produces the
  // effort that is optimal for its true confirmation probability.
  out.realized.mechanism = Mechanism::adverse_selection_only;
  out.realized.epsilon = econ.epsilon;
  long double total = 0.0L;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto& item = out.design_menu.items[static_cast<std::size_t>(
        out.design_index_of_type[i])];
    const double u =
        device_utility(types[i].lambda, item.unit_bonus, item.salary, econ);
    out.realized.per_type_utilities.push_back(u);
    total += static_cast<long double>(z) * types[i].q *
             (2.0L * econ.epsilon * types[i].lambda * item.unit_bonus -
              item.salary -
              2.0L * types[i].lambda * item.unit_bonus * item.unit_bonus);
  }
  out.realized.blockchain_utility = static_cast<double>(total);
  return out;
}

MechanismResult fixed_pow_reward(const std::vector<TypeProfile>& types,
                                 const EconParams& econ, int z,
                                 double calibration_quantile) {
  if (types.empty()) throw std::invalid_argument("types: must be nonempty");
  if (!(calibration_quantile >= 0.0 && calibration_quantile <= 1.0))
    throw std::invalid_argument("calibration_quantile: must be in [0, 1]");
  const ContractMenu proposed = solve(types, econ, z);

  // The flat item is the proposed item at the requested mass quantile, so the
  // calibration type's utility matches its proposed-contract utility exactly.
  std::size_t m = types.size() - 1;
  double cum = 0.0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    cum += types[i].q;
    if (cum >= calibration_quantile) {
      m = i;
      break;
    }
  }
  const ContractItem& flat = proposed.items[m];

  MechanismResult r;
  r.mechanism = Mechanism::fixed_pow;
  r.epsilon = econ.epsilon;
  long double total = 0.0L;
  for (const auto& t : types) {
    const double u = device_utility(t.lambda, flat.unit_bonus, flat.salary, econ);
    if (u < 0.0) {
      r.per_type_utilities.push_back(0.0);  // opts out
      continue;
    }
    r.per_type_utilities.push_back(u);
    total += static_cast<long double>(z) * t.q *
             (2.0L * econ.epsilon * t.lambda * flat.unit_bonus - flat.salary -
              2.0L * t.lambda * flat.unit_bonus * flat.unit_bonus);
  }
  r.blockchain_utility = static_cast<double>(total);
  return r;
}

std::vector<MechanismResult> sweep_epsilon(double lo, double hi, double step,
                                           const std::vector<TypeProfile>& types,
                                           const EconParams& econ, int z) {
  if (!(step > 0.0) || !(hi >= lo))
    throw std::invalid_argument("sweep_epsilon: invalid range");
  std::vector<MechanismResult> rows;
  for (double eps = lo; eps <= hi + 1e-9; eps += step) {
    EconParams e = econ;
    e.epsilon = eps;
    rows.push_back(perfect_information_result(types, e, z));
    rows.push_back(proposed_result(types, e, z));
    rows.push_back(adverse_selection_only_menu(types, e, z).realized);
    rows.push_back(fixed_pow_reward(types, e, z));
  }
  return rows;
}

void write_mechanisms_csv(std::ostream& os, const std::vector<MechanismResult>& rows) {
  os << "mechanism,epsilon,blockchain_utility\n";
  for (const auto& r : rows)
    os << mechanism_name(r.mechanism) << ',' << csv_num(r.epsilon) << ','
       << csv_num(r.blockchain_utility) << '\n';
}

std::vector<PcSurfaceCell> sweep_pc_surfaces(const std::vector<int>& z_list,
                                             const std::vector<double>& p_l_list,
                                             long trials_per_bucket, uint64_t seed,
                                             int buckets) {
  std::vector<PcSurfaceCell> cells;
  for (int z : z_list) {
    for (double p_l : p_l_list) {
      PcSurfaceCell cell;
      cell.z = z;
      cell.p_l = p_l;
      const uint64_t cell_seed =
          mix64(seed ^ mix64((static_cast<uint64_t>(z) << 20) ^
                             static_cast<uint64_t>(p_l * 1e6)));
      cell.estimate = estimate_pc(z, p_l, trials_per_bucket, cell_seed, buckets);
      double cmin = 1.0, cmax = 0.0;
      for (const auto& s : cell.estimate.samples) {
        cmin = std::min(cmin, s.c_norm);
        cmax = std::max(cmax, s.c_norm);
      }
      if (cell.estimate.samples.size() >= 4 && cmax > cmin) {
        cell.fit = fit_pc(cell.estimate.samples);
        cell.fit_valid = true;
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void write_pc_surfaces_csv(std::ostream& os, const std::vector<PcSurfaceCell>& cells) {
  os << "z,p_l,c_norm,p_c_hat,p_c_fit\n";
  for (const auto& cell : cells) {
    for (const auto& s : cell.estimate.samples) {
      os << cell.z << ',' << csv_num(cell.p_l) << ',' << csv_num(s.c_norm) << ','
         << csv_num(s.p_c_hat) << ',';
      if (cell.fit_valid) os << csv_num(predict_pc(cell.fit.params, s.c_norm));
      else os << "nan";
      os << '\n';
    }
  }
}

std::vector<CapabilitySurfaceRow> energy_and_g_surfaces(
    const std::vector<Capability>& grid, const NetworkParams& net,
    const ChannelParams& ch, const FitParams& fit, const EconParams& econ) {
  (void)econ;
  std::vector<CapabilitySurfaceRow> rows;
  for (const auto& cap : grid) {
    validate(cap, net);
    CapabilitySurfaceRow row;
    row.h = cap.hash_power;
    row.c = cap.connectivity;
    row.p = cap.tx_power;
    row.e_b = energy_per_block(cap, net);
    row.g = total_confirm_prob(cap, net, ch, fit);
    rows.push_back(row);
  }
  return rows;
}

void write_capability_surface_csv(std::ostream& os,
                                  const std::vector<CapabilitySurfaceRow>& rows) {
  os << "h,c,p,e_b,g\n";
  for (const auto& r : rows)
    os << csv_num(r.h) << ',' << csv_num(r.c) << ',' << csv_num(r.p) << ','
       << csv_num(r.e_b) << ',' << csv_num(r.g) << '\n';
}

}  // namespace wbc
