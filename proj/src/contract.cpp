#include "wbc/contract.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "wbc/csv.hpp"

namespace wbc {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kLambdaMergeTol = 1e-12;

// Per-coordinate quadratic W(b) = a*b - d*b^2 of the reduced objective.
struct Quad {
  double a = 0.0;
  double d = 0.0;
};

std::vector<Quad> reduced_coefficients(const std::vector<TypeProfile>& types,
                                       const EconParams& econ) {
  const auto L = types.size();
  std::vector<double> tail(L + 1, 0.0);  // S_i = sum of masses from i up
  for (std::size_t i = L; i-- > 0;) tail[i] = tail[i + 1] + types[i].q;
  std::vector<Quad> coef(L);
  for (std::size_t i = 0; i < L; ++i) {
    const double lam = types[i].lambda;
    const double lam_tail = lam * tail[i];
    const double next_tail = i + 1 < L ? types[i + 1].lambda * tail[i + 1] : 0.0;
    coef[i].a = 2.0 * econ.epsilon * lam * types[i].q;
    coef[i].d = 2.0 * lam * types[i].q + (lam_tail - next_tail) / (econ.theta - 1.0);
  }
  return coef;
}

// Argmax of a*b - d*b^2 over [0, epsilon], ties to the smallest maximizer.
// Concave (d > 0): the clamped vertex. Otherwise the quadratic is
// nondecreasing on [0, inf) whenever a >= 0, so the cap wins.
double quad_argmax(double a, double d, double epsilon) {
  if (d > 0.0) return std::clamp(a / (2.0 * d), 0.0, epsilon);
  if (a > 0.0 || d < 0.0) return epsilon;
  return 0.0;
}

void require_sorted(const std::vector<TypeProfile>& types) {
  for (std::size_t i = 0; i + 1 < types.size(); ++i)
    if (types[i].lambda > types[i + 1].lambda)
      throw std::invalid_argument("types: must be sorted by lambda");
}

double item_device_utility(const ContractItem& item, const TypeProfile& type,
                           const EconParams& econ) {
  return device_utility(type.lambda, item.unit_bonus, item.salary, econ);
}

}  // namespace

std::vector<Capability> default_capability_grid() {
  std::vector<Capability> grid;
  for (double h : {11.0, 12.0, 13.0})
    for (double c : {3.0, 10.0, 15.0, 20.0})
      for (double p : {5.0, 10.0, 15.0, 20.0}) grid.push_back({h, c, p});
  return grid;
}

std::vector<TypeProfile> build_types(const std::vector<Capability>& population,
                                     int L, TypingMode mode,
                                     const NetworkParams& net,
                                     const ChannelParams& ch,
                                     const FitParams& fit,
                                     const EconParams& econ) {
  if (population.empty())
    throw std::invalid_argument("population: must be nonempty");
  if (L < 1) throw std::invalid_argument("L: must be >= 1");
  for (const auto& cap : population) validate(cap, net);

  std::vector<TypeProfile> types;

  if (mode == TypingMode::grid) {
    const auto grid = default_capability_grid();
    auto snap = [](double v, std::initializer_list<double> axis) {
      double best = *axis.begin();
      for (double x : axis)
        if (std::abs(v - x) < std::abs(v - best)) best = x;
      return best;
    };
    std::vector<double> mass(grid.size(), 0.0);
    for (const auto& cap : population) {
      const Capability snapped{snap(cap.hash_power, {11.0, 12.0, 13.0}),
                               snap(cap.connectivity, {3.0, 10.0, 15.0, 20.0}),
                               snap(cap.tx_power, {5.0, 10.0, 15.0, 20.0})};
      for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid[k].hash_power == snapped.hash_power &&
            grid[k].connectivity == snapped.connectivity &&
            grid[k].tx_power == snapped.tx_power) {
          mass[k] += 1.0;
          break;
        }
      }
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (mass[k] == 0.0) continue;
      TypeProfile t;
      t.representative = grid[k];
      t.g = total_confirm_prob(grid[k], net, ch, fit);
      t.f = energy_cost_coeff(grid[k], net, econ);
      t.lambda = type_lambda(t.g, t.f);
      t.q = mass[k] / static_cast<double>(population.size());
      types.push_back(t);
    }
  } else {
    struct Member {
      double lambda, g, f;
      Capability cap;
    };
    std::vector<Member> members;
    members.reserve(population.size());
    for (const auto& cap : population) {
      Member m;
      m.cap = cap;
      m.g = total_confirm_prob(cap, net, ch, fit);
      m.f = energy_cost_coeff(cap, net, econ);
      m.lambda = type_lambda(m.g, m.f);
      members.push_back(m);
    }
    std::sort(members.begin(), members.end(),
              [](const Member& a, const Member& b) { return a.lambda < b.lambda; });
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < members.size(); ++i)
      if (members[i].lambda != members[i - 1].lambda) ++distinct;
    if (static_cast<std::size_t>(L) > distinct)
      throw std::invalid_argument("L: exceeds the number of distinct lambda values");

    const std::size_t n = members.size();
    for (int g = 0; g < L; ++g) {
      const std::size_t lo = g * n / L;
      const std::size_t hi = (g + 1) * n / L;
      double lam_sum = 0.0, f_sum = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        lam_sum += members[i].lambda;
        f_sum += members[i].f;
      }
      const auto count = static_cast<double>(hi - lo);
      TypeProfile t;
      t.lambda = lam_sum / count;
      t.f = f_sum / count;
      t.g = std::sqrt(2.0 * t.lambda * t.f);
      t.q = count / static_cast<double>(n);
      std::size_t best = lo;
      for (std::size_t i = lo; i < hi; ++i)
        if (std::abs(members[i].lambda - t.lambda) <
            std::abs(members[best].lambda - t.lambda))
          best = i;
      t.representative = members[best].cap;
      types.push_back(t);
    }
  }

  std::sort(types.begin(), types.end(), [](const TypeProfile& a, const TypeProfile& b) {
    return a.lambda < b.lambda;
  });

  // Identical types must share one item, so equal lambdas merge with summed mass.
  std::vector<TypeProfile> merged;
  for (auto& t : types) {
    if (!merged.empty() &&
        std::abs(t.lambda - merged.back().lambda) <=
            kLambdaMergeTol * std::max(1.0, std::abs(t.lambda))) {
      merged.back().q += t.q;
    } else {
      merged.push_back(t);
    }
  }
  double total = 0.0;
  for (const auto& t : merged) total += t.q;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    merged[i].q /= total;
    merged[i].index = static_cast<int>(i) + 1;
  }
  return merged;
}

std::vector<FocEntry> unconstrained_bonus(const std::vector<TypeProfile>& types,
                                          const EconParams& econ) {
  validate(econ);
  require_sorted(types);
  const auto coef = reduced_coefficients(types, econ);
  std::vector<FocEntry> foc(coef.size());
  for (std::size_t i = 0; i < coef.size(); ++i) {
    foc[i].concave = coef[i].d > 0.0;
    foc[i].value = quad_argmax(coef[i].a, coef[i].d, econ.epsilon);
  }
  return foc;
}

IronResult iron(const std::vector<FocEntry>& foc,
                const std::vector<TypeProfile>& types, const EconParams& econ) {
  if (foc.size() != types.size())
    throw std::invalid_argument("iron: foc/type size mismatch");
  require_sorted(types);
  const auto coef = reduced_coefficients(types, econ);

  struct Block {
    int first, last;
    double a, d, value;
  };
  std::vector<Block> blocks;
  blocks.reserve(foc.size());
  for (std::size_t i = 0; i < foc.size(); ++i)
    blocks.push_back({static_cast<int>(i), static_cast<int>(i), coef[i].a,
                      coef[i].d, foc[i].value});

  auto merge_right = [&](std::size_t k) {
    blocks[k].last = blocks[k + 1].last;
    blocks[k].a += blocks[k + 1].a;
    blocks[k].d += blocks[k + 1].d;
    blocks[k].value = quad_argmax(blocks[k].a, blocks[k].d, econ.epsilon);
    blocks.erase(blocks.begin() + static_cast<long>(k) + 1);
  };

  // A non-concave coordinate's objective is nondecreasing, so at the optimum
  // it binds upward; pool it with its right neighbor until the block turns
  // concave. The topmost coordinate is always concave, so this terminates.
  for (std::size_t k = 0; k < blocks.size();) {
    if (blocks[k].d <= 0.0 && k + 1 < blocks.size()) merge_right(k);
    else ++k;
  }

  // Pool adjacent violators.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k + 1 < blocks.size();) {
      if (blocks[k].value > blocks[k + 1].value) {
        merge_right(k);
        changed = true;
        if (k > 0) --k;
      } else {
        ++k;
      }
    }
  }

  IronResult result;
  result.bonuses.assign(foc.size(), 0.0);
  for (const auto& b : blocks) {
    for (int i = b.first; i <= b.last; ++i) result.bonuses[static_cast<std::size_t>(i)] = b.value;
    if (b.last > b.first) result.pools.push_back({b.first, b.last, b.value});
  }
  return result;
}

std::vector<double> salaries(const std::vector<double>& bonuses,
                             const std::vector<TypeProfile>& types,
                             const EconParams& econ) {
  if (bonuses.size() != types.size())
    throw std::invalid_argument("salaries: bonus/type size mismatch");
  require_sorted(types);
  double prev = 0.0;  // b_0 = 0
  for (double b : bonuses) {
    if (b + kFeasTol < prev)
      throw std::invalid_argument("salaries: bonuses must be nondecreasing");
    prev = b;
  }
  std::vector<double> s(bonuses.size());
  double acc = 0.0;
  prev = 0.0;
  for (std::size_t i = 0; i < bonuses.size(); ++i) {
    acc += types[i].lambda * (bonuses[i] * bonuses[i] - prev * prev) /
           (econ.theta - 1.0);
    s[i] = acc;
    prev = bonuses[i];
  }
  return s;
}

ContractMenu solve(const std::vector<TypeProfile>& types, const EconParams& econ,
                   int z) {
  if (types.empty()) throw std::invalid_argument("types: must be nonempty");
  const auto foc = unconstrained_bonus(types, econ);
  IronResult ironed = iron(foc, types, econ);
  const auto s = salaries(ironed.bonuses, types, econ);

  ContractMenu menu;
  menu.pools = std::move(ironed.pools);
  menu.items.resize(types.size());
  for (std::size_t i = 0; i < types.size(); ++i) {
    ContractItem& item = menu.items[i];
    item.unit_bonus = ironed.bonuses[i];
    item.salary = s[i];
    item.block_count = optimal_block_count(types[i].g, types[i].f, item.unit_bonus);
    item.expected_reward =
        item.salary + item.unit_bonus * item.block_count * types[i].g;
  }
  menu.blockchain_utility = blockchain_utility(menu, types, econ, z);
  return menu;
}

UtilityForms blockchain_utility_forms(const ContractMenu& menu,
                                      const std::vector<TypeProfile>& types,
                                      const EconParams& econ, int z) {
  if (menu.items.size() != types.size())
    throw std::invalid_argument("blockchain_utility: menu/type size mismatch");
  UtilityForms forms;
  long double converted = 0.0L;
  long double substituted = 0.0L;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto& t = types[i];
    const auto& item = menu.items[i];
    const long double zq = static_cast<long double>(z) * t.q;
    const long double b = item.unit_bonus;
    const long double conv =
        zq * (2.0L * econ.epsilon * t.lambda * b - item.salary -
              2.0L * t.lambda * b * b);
    const long double e = item.block_count;
    const long double sub =
        zq * (econ.epsilon * t.g * e - item.salary - t.g * b * e);
    converted += conv;
    substituted += sub;
    forms.per_type.push_back(static_cast<double>(conv));
  }
  forms.converted = static_cast<double>(converted);
  forms.substituted = static_cast<double>(substituted);
  return forms;
}

double blockchain_utility(const ContractMenu& menu,
                          const std::vector<TypeProfile>& types,
                          const EconParams& econ, int z) {
  const UtilityForms forms = blockchain_utility_forms(menu, types, econ, z);
  if (std::abs(forms.converted - forms.substituted) > kFeasTol)
    throw std::logic_error("blockchain_utility: algebraic routes disagree");
  return forms.converted;
}

VerifyReport verify_menu(const ContractMenu& menu,
                         const std::vector<TypeProfile>& types,
                         const EconParams& econ) {
  VerifyReport report;
  report.pass = true;
  report.worst_violation = std::numeric_limits<double>::infinity();
  const auto L = types.size();
  if (menu.items.size() != L)
    throw std::invalid_argument("verify_menu: menu/type size mismatch");

  auto record = [&](double slack, const std::string& what) {
    if (slack < report.worst_violation) {
      report.worst_violation = slack;
      report.worst_check = what;
    }
    if (slack < -kFeasTol) report.pass = false;
  };

  // IR: every type weakly prefers its item to opting out.
  for (std::size_t i = 0; i < L; ++i) {
    const double u = item_device_utility(menu.items[i], types[i], econ);
    record(u, "IR type " + std::to_string(i + 1));
    ++report.ir_checks;
  }
  // Lowest type held exactly to zero.
  {
    const double u1 = item_device_utility(menu.items[0], types[0], econ);
    record(-std::abs(u1), "IR binding for type 1");
  }
  // Full IC matrix.
  for (std::size_t i = 0; i < L; ++i) {
    const double own = item_device_utility(menu.items[i], types[i], econ);
    for (std::size_t j = 0; j < L; ++j) {
      if (i == j) continue;
      const double other = item_device_utility(menu.items[j], types[i], econ);
      record(own - other,
             "IC type " + std::to_string(i + 1) + " vs item " + std::to_string(j + 1));
      ++report.ic_checks;
    }
  }
  // Monotonicity of salary and bonus.
  for (std::size_t i = 0; i + 1 < L; ++i) {
    record(menu.items[i + 1].salary - menu.items[i].salary,
           "salary monotonicity at " + std::to_string(i + 1));
    record(menu.items[i + 1].unit_bonus - menu.items[i].unit_bonus,
           "bonus monotonicity at " + std::to_string(i + 1));
  }
  if (L == 0) report.pass = false;
  return report;
}

std::string menu_to_json(const ContractMenu& menu,
                         const std::vector<TypeProfile>& types,
                         const EconParams& econ, const std::string& config_hash) {
  nlohmann::json j;
  j["blockchain_utility"] = menu.blockchain_utility;
  j["pools"] = nlohmann::json::array();
  for (const auto& p : menu.pools)
    j["pools"].push_back({{"first", p.first + 1}, {"last", p.last + 1}, {"b", p.value}});
  j["types"] = nlohmann::json::array();
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto& t = types[i];
    const auto& item = menu.items[i];
    j["types"].push_back({{"index", t.index},
                          {"lambda", t.lambda},
                          {"q", t.q},
                          {"s", item.salary},
                          {"b", item.unit_bonus},
                          {"e", item.block_count},
                          {"expected_reward", item.expected_reward},
                          {"device_utility", item_device_utility(item, t, econ)}});
  }
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  return j.dump(2) + "\n";
}

MenuFile menu_from_json(std::istream& is) {
  nlohmann::json j = nlohmann::json::parse(is);
  MenuFile file;
  file.menu.blockchain_utility = j.value("blockchain_utility", 0.0);
  for (const auto& p : j.value("pools", nlohmann::json::array()))
    file.menu.pools.push_back(
        {p.at("first").get<int>() - 1, p.at("last").get<int>() - 1, p.at("b").get<double>()});
  for (const auto& rec : j.at("types")) {
    TypeProfile t;
    t.index = rec.at("index").get<int>();
    t.lambda = rec.at("lambda").get<double>();
    t.q = rec.at("q").get<double>();
    file.types.push_back(t);
    ContractItem item;
    item.salary = rec.at("s").get<double>();
    item.unit_bonus = rec.at("b").get<double>();
    item.block_count = rec.at("e").get<double>();
    item.expected_reward = rec.value("expected_reward", 0.0);
    file.menu.items.push_back(item);
  }
  return file;
}

void write_menu_csv(std::ostream& os, const ContractMenu& menu,
                    const std::vector<TypeProfile>& types, const EconParams& econ) {
  os << "index,lambda,q,s,b,e,expected_reward,device_utility\n";
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto& t = types[i];
    const auto& item = menu.items[i];
    os << t.index << ',' << csv_num(t.lambda) << ',' << csv_num(t.q) << ','
       << csv_num(item.salary) << ',' << csv_num(item.unit_bonus) << ','
       << csv_num(item.block_count) << ',' << csv_num(item.expected_reward) << ','
       << csv_num(item_device_utility(item, t, econ)) << '\n';
  }
}

}  // namespace wbc
