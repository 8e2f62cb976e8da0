#include "aoapilot/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "aoapilot/errors.hpp"

namespace aoapilot {

PilotAssignment::PilotAssignment(int L, int K)
    : L_(L), K_(K), user_of_(static_cast<std::size_t>(L) * K), pilot_of_(user_of_.size()) {
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      user_of_[l * K + k] = k;
      pilot_of_[l * K + k] = k;
    }
  }
}

PilotAssignment PilotAssignment::from_users(int L, int K, std::vector<int> user_of_pilot) {
  if (user_of_pilot.size() != static_cast<std::size_t>(L) * K) {
    throw ConfigError("assignment needs L*K entries");
  }
  PilotAssignment a;
  a.L_ = L;
  a.K_ = K;
  a.user_of_ = std::move(user_of_pilot);
  a.pilot_of_.assign(a.user_of_.size(), -1);
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      const int u = a.user_of_[l * K + k];
      if (u < 0 || u >= K || a.pilot_of_[l * K + u] != -1) {
        throw ConfigError("cell " + std::to_string(l) + " is not a permutation of 0..K-1");
      }
      a.pilot_of_[l * K + u] = k;
    }
  }
  return a;
}

void PilotAssignment::swap_pilots(int cell, int pilot_a, int pilot_b) {
  if (pilot_a == pilot_b) return;
  int& ua = user_of_[cell * K_ + pilot_a];
  int& ub = user_of_[cell * K_ + pilot_b];
  std::swap(ua, ub);
  pilot_of_[cell * K_ + ua] = pilot_a;
  pilot_of_[cell * K_ + ub] = pilot_b;
}

void PilotAssignment::set_cell(int cell, const std::vector<int>& users_by_pilot) {
  for (int k = 0; k < K_; ++k) {
    user_of_[cell * K_ + k] = users_by_pilot[k];
    pilot_of_[cell * K_ + users_by_pilot[k]] = k;
  }
}

bool PilotAssignment::valid() const {
  if (user_of_.size() != static_cast<std::size_t>(L_) * K_ || pilot_of_.size() != user_of_.size()) {
    return false;
  }
  for (int l = 0; l < L_; ++l) {
    std::vector<bool> seen(K_, false);
    for (int k = 0; k < K_; ++k) {
      const int u = user(l, k);
      if (u < 0 || u >= K_ || seen[u] || pilot(l, u) != k) return false;
      seen[u] = true;
    }
  }
  return true;
}

void write_assignment(std::ostream& os, const PilotAssignment& a) {
  for (int l = 0; l < a.L(); ++l) {
    for (int k = 0; k < a.K(); ++k) os << (k ? " " : "") << a.user(l, k);
    os << '\n';
  }
}

PilotAssignment read_assignment(std::istream& is) {
  std::vector<int> users;
  int L = 0;
  int K = -1;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream row(line);
    std::vector<int> values;
    int v;
    while (row >> v) values.push_back(v);
    if (values.empty()) continue;
    if (K < 0) K = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != K) throw ConfigError("ragged assignment matrix");
    users.insert(users.end(), values.begin(), values.end());
    ++L;
  }
  if (L == 0) throw ConfigError("empty assignment matrix");
  return PilotAssignment::from_users(L, K, std::move(users));
}

PilotAssignment apply_swap(const PilotAssignment& assignment, const SwapAction& action) {
  PilotAssignment next = assignment;
  next.swap_pilots(action.cell, action.pilot, action.other_pilot);
  return next;
}

PilotAssignment random_assignment(int L, int K, RandomStream& rng) {
  PilotAssignment a(L, K);
  std::vector<int> perm(K);
  for (int l = 0; l < L; ++l) {
    std::iota(perm.begin(), perm.end(), 0);
    // Fisher-Yates with our own uniform draw for cross-platform determinism.
    for (int i = K - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
    a.set_cell(l, perm);
  }
  return a;
}

CostTable total_costs(const PilotAssignment& assignment, const ScenarioBundle& world) {
  const int L = world.L();
  const int K = world.K();
  CostTable t;
  t.L = L;
  t.K = K;
  t.pair_costs.assign(static_cast<std::size_t>(L) * K * L, 0.0);
  t.user_costs.assign(static_cast<std::size_t>(L) * K, 0.0);
  t.cell_max.assign(L, 0.0);
  t.global_max = -1.0;
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < K; ++k) {
      const int u = assignment.user(j, k);
      double sum = 0.0;
      for (int l = 0; l < L; ++l) {
        if (l == j) continue;
        const double c = world.pair_cost(j, u, l, assignment.user(l, k));
        t.pair_costs[(j * K + k) * L + l] = c;
        sum += c;
      }
      t.user_costs[j * K + k] = sum;
      t.cell_max[j] = std::max(t.cell_max[j], sum);
      if (sum > t.global_max) {
        t.global_max = sum;
        t.worst_cell = j;
        t.worst_pilot = k;
      }
    }
  }
  return t;
}

double global_max_cost(const PilotAssignment& assignment, const ScenarioBundle& world) {
  const int L = world.L();
  const int K = world.K();
  double worst = 0.0;
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < K; ++k) {
      const int u = assignment.user(j, k);
      double sum = 0.0;
      for (int l = 0; l < L; ++l) {
        if (l != j) sum += world.pair_cost(j, u, l, assignment.user(l, k));
      }
      worst = std::max(worst, sum);
    }
  }
  return worst;
}

double exhaustive_size(int L, int K) {
  double fact = 1.0;
  for (int i = 2; i <= K; ++i) fact *= i;
  return std::pow(fact, L - 1);
}

SearchResult exhaustive_search(const ScenarioBundle& world, double budget) {
  const int L = world.L();
  const int K = world.K();
  const double size = exhaustive_size(L, K);
  if (size > budget) {
    std::ostringstream msg;
    msg << "exhaustive search over " << size << " assignments exceeds the budget of " << budget
        << "; raise the budget explicitly (long-run flag) or use a sampled search";
    throw BudgetExceeded(msg.str());
  }

  std::vector<std::vector<int>> perms;
  std::vector<int> p(K);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));

  // digit[l] indexes perms for cell l >= 1; cell 1 is the most significant.
  std::vector<std::size_t> digit(L, 0);
  PilotAssignment current(L, K);
  PilotAssignment best = current;
  double best_cost = INFINITY;
  std::uint64_t evaluated = 0;
  while (true) {
    const double cost = global_max_cost(current, world);
    ++evaluated;
    if (cost < best_cost) {
      best_cost = cost;
      best = current;
    }
    int cell = L - 1;
    while (cell >= 1) {
      if (++digit[cell] < perms.size()) {
        current.set_cell(cell, perms[digit[cell]]);
        break;
      }
      digit[cell] = 0;
      current.set_cell(cell, perms[0]);
      --cell;
    }
    if (cell < 1) break;
  }
  return {best, total_costs(best, world), evaluated};
}

PilotMap PilotMap::from_assignment(const PilotAssignment& a) {
  PilotMap m;
  m.L = a.L();
  m.K = a.K();
  m.pilot_count = a.K();
  m.pilot_of.resize(static_cast<std::size_t>(a.L()) * a.K());
  for (int l = 0; l < a.L(); ++l) {
    for (int u = 0; u < a.K(); ++u) m.pilot_of[l * a.K() + u] = a.pilot(l, u);
  }
  return m;
}

double global_max_cost(const PilotMap& map, const ScenarioBundle& world) {
  const int L = world.L();
  const int K = world.K();
  double worst = 0.0;
  for (int j = 0; j < L; ++j) {
    for (int u = 0; u < K; ++u) {
      double sum = 0.0;
      for (int l = 0; l < L; ++l) {
        if (l == j) continue;
        for (int v = 0; v < K; ++v) {
          if (map.pilot(l, v) == map.pilot(j, u)) sum += world.pair_cost(j, u, l, v);
        }
      }
      worst = std::max(worst, sum);
    }
  }
  return worst;
}

OverheadReport spr_overhead(int L, int K, double edge_ratio) {
  if (!(edge_ratio >= 0.0 && edge_ratio < 1.0)) {
    throw ConfigError("edge_ratio must lie in [0, 1)");
  }
  OverheadReport r;
  r.base_pilots = K;
  r.edge_pilots_per_cell = static_cast<int>(std::lround(K * edge_ratio / (1.0 + edge_ratio)));
  r.central_pilots = K - r.edge_pilots_per_cell;
  r.required_pilots = r.central_pilots + L * r.edge_pilots_per_cell;
  r.extra_percent = 100.0 * (r.required_pilots - K) / K;
  r.total_percent = 100.0 * r.required_pilots / K;
  std::ostringstream conv;
  conv << "required = central + L*edge = " << r.central_pilots << " + " << L << "*"
       << r.edge_pilots_per_cell << " = " << r.required_pilots << " vs " << K
       << "; total-count convention " << r.total_percent << "% of base, extra-count convention +"
       << r.extra_percent << "%";
  r.convention = conv.str();
  return r;
}

SprAssignment spr_like_assignment(const ScenarioBundle& world, double edge_ratio) {
  const int L = world.L();
  const int K = world.K();
  SprAssignment out;
  out.overhead = spr_overhead(L, K, edge_ratio);
  const int n_edge = out.overhead.edge_pilots_per_cell;
  const int n_central = out.overhead.central_pilots;
  out.map.L = L;
  out.map.K = K;
  out.map.pilot_count = out.overhead.required_pilots;
  out.map.pilot_of.assign(static_cast<std::size_t>(L) * K, -1);
  out.edge.assign(out.map.pilot_of.size(), false);
  for (int l = 0; l < L; ++l) {
    const Position bs = world.layout().bs_positions[l];
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return distance(world.drop().user(l, a), bs) < distance(world.drop().user(l, b), bs);
    });
    for (int r = 0; r < K; ++r) {
      const int u = order[r];
      if (r < n_central) {
        out.map.pilot_of[l * K + u] = r;
      } else {
        out.map.pilot_of[l * K + u] = n_central + l * n_edge + (r - n_central);
        out.edge[l * K + u] = true;
      }
    }
  }
  return out;
}

}  // namespace aoapilot
