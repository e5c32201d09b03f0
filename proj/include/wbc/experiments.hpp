#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wbc/contract.hpp"
#include "wbc/curve_fit.hpp"
#include "wbc/fork_sim.hpp"

// Comparison mechanisms and the parameter sweeps that reproduce the study's
// datasets: blockchain utility under four incentive schemes across the yield
// coefficient, connectivity/confirmation surfaces over (Z, P_l), and the
// energy/confirmation values over the capability lattice.

namespace wbc {

enum class Mechanism { proposed, adverse_selection_only, fixed_pow, perfect_information };

const char* mechanism_name(Mechanism m);

struct MechanismResult {
  Mechanism mechanism = Mechanism::proposed;
  double epsilon = 0.0;
  double blockchain_utility = 0.0;
  std::vector<double> per_type_utilities;  // realized device utilities, type order
};

// Full-information benchmark: every type gets b = eps*(theta-1)/(2*theta-1)
// and the salary that holds its utility at exactly zero.
ContractMenu perfect_information_menu(const std::vector<TypeProfile>& types,
                                      const EconParams& econ);

struct AdverseSelectionOutcome {
  std::vector<TypeProfile> design_types;  // lambda' = 1/(2F), re-sorted
  ContractMenu design_menu;               // feasible under lambda'
  std::vector<int> design_index_of_type;  // true type -> design type position
  MechanismResult realized;               // evaluated under the true lambdas
};

// Menu designed as if every block were confirmed (G = 1), then evaluated at
// the devices' true confirmation probabilities. Devices self-select by their
// design-time utility and exert true-optimal effort at the signed item.
AdverseSelectionOutcome adverse_selection_only_menu(
    const std::vector<TypeProfile>& types, const EconParams& econ, int z);

// Flat scheme: every device is offered the proposed menu's item at the given
// mass quantile (default the median type). Devices with negative utility at
// that item opt out and contribute nothing.
MechanismResult fixed_pow_reward(const std::vector<TypeProfile>& types,
                                 const EconParams& econ, int z,
                                 double calibration_quantile = 0.5);

MechanismResult proposed_result(const std::vector<TypeProfile>& types,
                                const EconParams& econ, int z);
MechanismResult perfect_information_result(const std::vector<TypeProfile>& types,
                                           const EconParams& econ, int z);

// All four mechanisms at each epsilon in [lo, hi] stepped by step.
std::vector<MechanismResult> sweep_epsilon(double lo, double hi, double step,
                                           const std::vector<TypeProfile>& types,
                                           const EconParams& econ, int z);

// CSV with header `mechanism,epsilon,blockchain_utility`.
void write_mechanisms_csv(std::ostream& os, const std::vector<MechanismResult>& rows);

struct PcSurfaceCell {
  int z = 0;
  double p_l = 0.0;
  PcEstimate estimate;
  FitReport fit;
  bool fit_valid = false;  // false when too few buckets to fit the model
};

// Drive the fork simulator and the curve fit over a (Z, P_l) grid.
std::vector<PcSurfaceCell> sweep_pc_surfaces(const std::vector<int>& z_list,
                                             const std::vector<double>& p_l_list,
                                             long trials_per_bucket, uint64_t seed,
                                             int buckets = 20);

// CSV with header `z,p_l,c_norm,p_c_hat,p_c_fit`.
void write_pc_surfaces_csv(std::ostream& os, const std::vector<PcSurfaceCell>& cells);

struct CapabilitySurfaceRow {
  double h = 0.0, c = 0.0, p = 0.0;
  double e_b = 0.0;
  double g = 0.0;
};

// Energy and confirmation probability over a capability grid.
std::vector<CapabilitySurfaceRow> energy_and_g_surfaces(
    const std::vector<Capability>& grid, const NetworkParams& net,
    const ChannelParams& ch, const FitParams& fit, const EconParams& econ);

// CSV with header `h,c,p,e_b,g`.
void write_capability_surface_csv(std::ostream& os,
                                  const std::vector<CapabilitySurfaceRow>& rows);

}  // namespace wbc
