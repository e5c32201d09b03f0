#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wbc/core_model.hpp"

// Optimal menu design for the converted one-dimensional contract problem:
// devices are collapsed to scalar types lambda = G^2/(2F) with masses Q, the
// blockchain utility is maximized over per-type (salary, unit bonus) items
// subject to individual rationality, incentive compatibility, and
// monotonicity. Bonuses come from per-type first-order conditions followed by
// ironing (pooling adjacent violators); salaries follow from the binding
// local downward incentive constraints.

namespace wbc {

struct TypeProfile {
  int index = 0;      // 1-based, after sorting by lambda
  double lambda = 0.0;
  double q = 0.0;     // probability mass
  Capability representative;
  double g = 0.0;     // confirmation probability of the representative
  double f = 0.0;     // energy cost coefficient of the representative
};

enum class TypingMode { grid, quantile };

// The 48-point capability lattice used as the default type population:
// h in {11,12,13} x c in {3,10,15,20} x p in {5,10,15,20}.
std::vector<Capability> default_capability_grid();

// Convert a device population into sorted types.
//   grid:     snap each capability to the nearest lattice point, mass by count
//   quantile: cluster by lambda into L equal-frequency groups; the group mean
//             lambda is the type's preference order, f is the group mean
//             energy coefficient, and g = sqrt(2*lambda*f) keeps the identity
//             lambda = g^2/(2f) exact
// Types with equal lambda are merged with summed mass.
std::vector<TypeProfile> build_types(const std::vector<Capability>& population,
                                     int L, TypingMode mode,
                                     const NetworkParams& net,
                                     const ChannelParams& ch,
                                     const FitParams& fit,
                                     const EconParams& econ);

// Per-coordinate quadratic of the reduced problem: W_i(b) = a*b - d*b^2.
// d <= 0 marks a non-concave coordinate that must be pooled during ironing.
struct FocEntry {
  double value = 0.0;  // argmax of W_i over [0, epsilon]
  bool concave = true;
};

// Stationary points of the reduced objective, one per type:
//   b_i = eps*Q_i*lambda_i / (2*Q_i*lambda_i + (lambda_i*S_i - lambda_{i+1}*S_{i+1})/(theta-1))
// with S_i the upper-tail mass and the i = L tail term zero.
std::vector<FocEntry> unconstrained_bonus(const std::vector<TypeProfile>& types,
                                          const EconParams& econ);

struct Pool {
  int first = 0;  // inclusive, 0-based type indices
  int last = 0;
  double value = 0.0;
};

struct IronResult {
  std::vector<double> bonuses;  // monotone nondecreasing
  std::vector<Pool> pools;      // pooled runs of length > 1
};

// Pool adjacent violators until the bonus sequence is monotone. Each pool's
// common value maximizes the summed per-type quadratics over [0, epsilon]
// (ties resolved to the smallest maximizer). Non-concave coordinates are
// pooled rightward first; every upper-tail pool is strictly concave, so the
// procedure terminates with interior block optima.
IronResult iron(const std::vector<FocEntry>& foc,
                const std::vector<TypeProfile>& types, const EconParams& econ);

// Salaries from the binding constraints: s_i = sum_{t<=i} lambda_t*(b_t^2 - b_{t-1}^2)/(theta-1),
// b_0 = 0. Requires monotone nondecreasing bonuses.
std::vector<double> salaries(const std::vector<double>& bonuses,
                             const std::vector<TypeProfile>& types,
                             const EconParams& econ);

struct ContractItem {
  double salary = 0.0;
  double unit_bonus = 0.0;
  double block_count = 0.0;      // implied optimal effort g*b/f
  double expected_reward = 0.0;  // s + b * e * g
};

struct ContractMenu {
  std::vector<ContractItem> items;  // one per type, in type order
  double blockchain_utility = 0.0;
  std::vector<Pool> pools;
};

// Full pipeline: unconstrained_bonus -> iron -> salaries -> per-type effort.
ContractMenu solve(const std::vector<TypeProfile>& types, const EconParams& econ,
                   int z);

struct VerifyReport {
  bool pass = false;
  double worst_violation = 0.0;  // most negative slack observed
  std::string worst_check;
  int ir_checks = 0;
  int ic_checks = 0;
};

// Exhaustive feasibility check: L individual-rationality and L(L-1) incentive
// -compatibility inequalities at tolerance 1e-9, monotonicity of s and b, and
// zero utility for the lowest type.
VerifyReport verify_menu(const ContractMenu& menu,
                         const std::vector<TypeProfile>& types,
                         const EconParams& econ);

struct UtilityForms {
  double converted = 0.0;    // sum_i Z*Q_i*(2*eps*lambda_i*b_i - s_i - 2*lambda_i*b_i^2)
  double substituted = 0.0;  // sum_i Z*Q_i*(eps*g_i*e_i - s_i - g_i*b_i*e_i)
  std::vector<double> per_type;  // converted per-type contributions
};

UtilityForms blockchain_utility_forms(const ContractMenu& menu,
                                      const std::vector<TypeProfile>& types,
                                      const EconParams& econ, int z);

// Converted-form utility; throws std::logic_error if the two algebraic routes
// disagree beyond 1e-9.
double blockchain_utility(const ContractMenu& menu,
                          const std::vector<TypeProfile>& types,
                          const EconParams& econ, int z);

// JSON: per-type records {index, lambda, q, s, b, e, expected_reward,
// device_utility} plus {blockchain_utility, pools}.
std::string menu_to_json(const ContractMenu& menu,
                         const std::vector<TypeProfile>& types,
                         const EconParams& econ, const std::string& config_hash);
struct MenuFile {
  ContractMenu menu;
  std::vector<TypeProfile> types;  // lambda and q recovered from the file
};
MenuFile menu_from_json(std::istream& is);

// CSV with header `index,lambda,q,s,b,e,expected_reward,device_utility`.
void write_menu_csv(std::ostream& os, const ContractMenu& menu,
                    const std::vector<TypeProfile>& types, const EconParams& econ);

}  // namespace wbc
