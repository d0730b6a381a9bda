#include "relay/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "relay/kernels.hpp"
#include "relay/numeric.hpp"

namespace relay {

namespace {

using Powers = std::vector<double>;

double welfare(const std::vector<const UserLink*>& users, const Powers& p,
               const SystemParams& sys) {
  double total = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i)
    total += rate_increase(*users[i], p[i], sys);
  return total;
}

// Rate increase of one user on the grid k * budget / n, k = 0..n.
std::vector<double> grid_table(const UserLink& u, double budget, int n,
                               const SystemParams& sys) {
  std::vector<double> powers(n + 1), out(n + 1);
  for (int k = 0; k <= n; ++k) powers[k] = budget * k / n;
  powers[n] = budget;
  kernels::rate_increase_batch(u, sys, powers, out);
  return out;
}

Powers grid_two(const std::vector<const UserLink*>& users, double budget,
                int n, const SystemParams& sys) {
  const auto a = grid_table(*users[0], budget, n, sys);
  auto b = grid_table(*users[1], budget, n, sys);
  std::reverse(b.begin(), b.end());
  const auto best = kernels::pair_sum_argmax(a, b);
  const double p0 = budget * static_cast<double>(best.index) / n;
  return {p0, std::max(budget - p0, 0.0)};
}

Powers grid_three(const std::vector<const UserLink*>& users, double budget,
                  int n, const SystemParams& sys) {
  const auto t0 = grid_table(*users[0], budget, n, sys);
  const auto t1 = grid_table(*users[1], budget, n, sys);
  auto t2r = grid_table(*users[2], budget, n, sys);
  std::reverse(t2r.begin(), t2r.end());
  // For p0 = i h the remaining m = n - i steps split as j + (m - j), and
  // t2[m - j] = t2r[i + j], so each row is one contiguous pair-sum scan.
  double best_value = -1.0;
  std::size_t best_i = 0, best_j = 0;
  const std::span<const double> row1(t1);
  const std::span<const double> row2(t2r);
  for (int i = 0; i <= n; ++i) {
    const std::size_t m = static_cast<std::size_t>(n - i);
    const auto inner =
        kernels::pair_sum_argmax(row1.subspan(0, m + 1), row2.subspan(i, m + 1));
    const double v = t0[i] + inner.value;
    if (v > best_value) {
      best_value = v;
      best_i = static_cast<std::size_t>(i);
      best_j = inner.index;
    }
  }
  const double h = budget / n;
  const double p0 = h * static_cast<double>(best_i);
  const double p1 = h * static_cast<double>(best_j);
  return {p0, p1, std::max(budget - p0 - p1, 0.0)};
}

// Best split of `amount` between users i and j, other powers fixed.
double best_transfer(const UserLink& ui, const UserLink& uj, double amount,
                     const SystemParams& sys, double current) {
  if (!(amount > 0.0)) return current;
  auto pair_value = [&](double t) {
    return rate_increase(ui, t, sys) + rate_increase(uj, amount - t, sys);
  };
  constexpr int kCoarse = 64;
  int best_k = 0;
  double best_v = pair_value(0.0);
  for (int k = 1; k <= kCoarse; ++k) {
    const double v = pair_value(amount * k / kCoarse);
    if (v > best_v) {
      best_v = v;
      best_k = k;
    }
  }
  const double lo = amount * std::max(best_k - 1, 0) / kCoarse;
  const double hi = amount * std::min(best_k + 1, kCoarse) / kCoarse;
  const auto polished = numeric::golden_section_max(pair_value, lo, hi, 1e-12);
  double t = best_k * amount / kCoarse;
  if (polished.value > best_v) t = polished.x;
  // The value is flat at an interior optimum; the balance of slopes pins the
  // split far more tightly than comparing values does.
  auto balance = [&](double x) {
    return rate_increase_slope(ui, x, sys) - rate_increase_slope(uj, amount - x, sys);
  };
  if (balance(lo) > 0.0 && balance(hi) < 0.0) {
    const double root = numeric::bisect_root(balance, lo, hi, 1e-15);
    if (!(pair_value(t) > pair_value(root) * (1.0 + 1e-14))) t = root;
  }
  if (pair_value(current) > pair_value(t) * (1.0 + 1e-14)) return current;
  return t;
}

void refine_pairs(const std::vector<const UserLink*>& users, Powers& p,
                  const SystemParams& sys) {
  const std::size_t k = users.size();
  for (int pass = 0; pass < 50; ++pass) {
    const double before = welfare(users, p, sys);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double amount = p[i] + p[j];
        const double t = best_transfer(*users[i], *users[j], amount, sys, p[i]);
        p[i] = t;
        p[j] = std::max(amount - t, 0.0);
      }
    }
    const double after = welfare(users, p, sys);
    if (!(after > before * (1.0 + 1e-13))) break;
  }
}

Powers multistart(const std::vector<const UserLink*>& users, double budget,
                  const WelfareOptions& options, const SystemParams& sys) {
  const std::size_t k = users.size();
  std::mt19937_64 rng(0x5eedULL + k);
  std::exponential_distribution<double> expo(1.0);
  Powers best(k, 0.0);
  double best_value = -1.0;
  for (int s = 0; s < std::max(options.seeds, 1); ++s) {
    Powers p(k, 0.0);
    if (static_cast<std::size_t>(s) < k) {
      p[s] = budget;  // everything to one user
    } else {
      double sum = 0.0;
      for (auto& v : p) sum += (v = expo(rng));  // uniform on the simplex
      for (auto& v : p) v *= budget / sum;
    }
    refine_pairs(users, p, sys);
    const double v = welfare(users, p, sys);
    if (v > best_value) {
      best_value = v;
      best = p;
    }
  }
  return best;
}

// Maximizes welfare over users[] with budget; `candidates` are extra
// feasible allocations to compare against before refinement.
Powers maximize_welfare(const std::vector<const UserLink*>& users,
                        double budget, const WelfareOptions& options,
                        const SystemParams& sys,
                        const std::vector<Powers>& candidates = {}) {
  const std::size_t k = users.size();
  if (options.grid_n < 16) throw ModelError("grid resolution must be >= 16");
  Powers p;
  switch (k) {
    case 0:
      return {};
    case 1:
      return {rate_increase(*users[0], budget, sys) > 0.0 ? budget : 0.0};
    case 2:
      p = grid_two(users, budget, options.grid_n, sys);
      break;
    case 3:
      p = grid_three(users, budget, options.grid_n, sys);
      break;
    default:
      p = multistart(users, budget, options, sys);
  }
  for (const auto& c : candidates)
    if (welfare(users, c, sys) > welfare(users, p, sys)) p = c;
  if (options.refine) refine_pairs(users, p, sys);
  for (std::size_t i = 0; i < k; ++i)
    if (!(rate_increase(*users[i], p[i], sys) > 0.0)) p[i] = 0.0;
  return p;
}

std::vector<const UserLink*> pointers(const NetworkScenario& s) {
  std::vector<const UserLink*> out;
  for (const auto& u : s.users) out.push_back(&u);
  return out;
}

double reduced_budget(const NetworkScenario& scenario, double delta) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw ModelError("delta must lie in [0, 1)");
  return scenario.relay_budget_w * (1.0 - delta);
}

}  // namespace

OracleAllocation describe_allocation(const NetworkScenario& scenario,
                                     std::vector<double> powers,
                                     double budget_used) {
  const auto& sys = scenario.system;
  OracleAllocation out;
  out.budget_used = budget_used;
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    const auto& u = scenario.users[i];
    const double p = powers.at(i);
    const double x = relayed_snr(u, p, sys);
    const double gain = rate_increase(u, p, sys);
    out.rate_increase.push_back(gain);
    out.delta_snr.push_back(x);
    out.marginal_utility.push_back(
        gain > 0.0 ? sys.bandwidth_hz /
                         (2.0 * std::numbers::ln2 * (1.0 + u.direct_snr() + x))
                   : 0.0);
    out.total_rate_increase += gain;
  }
  out.powers = std::move(powers);
  return out;
}

OracleAllocation efficient_allocation(const NetworkScenario& scenario,
                                      double delta,
                                      const WelfareOptions& options) {
  scenario.validate();
  const double budget = reduced_budget(scenario, delta);
  return describe_allocation(
      scenario,
      maximize_welfare(pointers(scenario), budget, options, scenario.system),
      budget);
}

OracleAllocation fair_allocation_for(
    const NetworkScenario& scenario, double delta,
    const std::vector<std::size_t>& participants) {
  scenario.validate();
  const double budget = reduced_budget(scenario, delta);
  const auto& sys = scenario.system;
  std::vector<double> powers(scenario.size(), 0.0);
  if (participants.empty()) return describe_allocation(scenario, powers, budget);

  // Every participant targets the same K = 1 + G_i + dSNR_i, which fixes a
  // common marginal W / (2 ln2 K). Total power is increasing in K.
  double k_lo = std::numeric_limits<double>::infinity();
  double k_hi = std::numeric_limits<double>::infinity();
  for (std::size_t i : participants) {
    const auto& u = scenario.users.at(i);
    k_lo = std::min(k_lo, 1.0 + u.direct_snr());
    k_hi = std::min(k_hi, 1.0 + u.direct_snr() + u.relayed_snr_ceiling());
  }
  auto powers_at = [&](double k, std::vector<double>& out) {
    double total = 0.0;
    for (std::size_t i : participants) {
      const auto& u = scenario.users[i];
      const double x = std::max(k - 1.0 - u.direct_snr(), 0.0);
      out[i] = relay_power_for_snr(u, x, sys);
      total += out[i];
    }
    return total;
  };
  std::vector<double> scratch(scenario.size(), 0.0);
  double lo = k_lo;
  double hi = k_hi;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (powers_at(mid, scratch) <= budget)
      lo = mid;
    else
      hi = mid;
  }
  powers_at(lo, powers);
  return describe_allocation(scenario, powers, budget);
}

OracleAllocation fair_allocation(const NetworkScenario& scenario,
                                 double delta) {
  scenario.validate();
  const double budget = reduced_budget(scenario, delta);
  std::vector<std::size_t> participants;
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    const auto kink = breakeven_power(scenario.users[i], scenario.system);
    if (kink && *kink <= budget) participants.push_back(i);
  }
  for (;;) {
    auto sol = fair_allocation_for(scenario, delta, participants);
    // One user per round, the one furthest below its break-even SNR: the
    // others may gain once the budget is shared among fewer users.
    auto worst = participants.end();
    double worst_ratio = 0.0;
    for (auto it = participants.begin(); it != participants.end(); ++it) {
      if (sol.rate_increase[*it] > 0.0) continue;
      const double g = scenario.users[*it].direct_snr();
      const double ratio = sol.delta_snr[*it] / (g * g + g);
      if (worst == participants.end() || ratio < worst_ratio) {
        worst = it;
        worst_ratio = ratio;
      }
    }
    if (worst == participants.end()) return sol;
    participants.erase(worst);
  }
}

VcgResult vcg_auction(const NetworkScenario& scenario, double delta,
                      const WelfareOptions& options) {
  scenario.validate();
  const double budget = reduced_budget(scenario, delta);
  const auto& sys = scenario.system;
  const auto all = pointers(scenario);
  const std::size_t n = all.size();

  VcgResult result;
  Powers chosen = maximize_welfare(all, budget, options, sys);
  result.welfare_solves = 1;

  // Welfare of everyone else with user i absent. The others' part of the
  // chosen allocation is feasible there and seeds the search.
  std::vector<double> without(n, 0.0);
  std::vector<Powers> without_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<const UserLink*> others;
    Powers seed;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      others.push_back(all[j]);
      seed.push_back(chosen[j]);
    }
    Powers p = maximize_welfare(others, budget, options, sys, {seed});
    ++result.welfare_solves;
    without[i] = welfare(others, p, sys);
    without_alloc[i].assign(n, 0.0);
    for (std::size_t j = 0, k = 0; j < n; ++j)
      if (j != i) without_alloc[i][j] = p[k++];
  }
  // Any reduced solve is feasible for the full problem; keep the best.
  for (std::size_t i = 0; i < n; ++i)
    if (without[i] > welfare(all, chosen, sys)) chosen = without_alloc[i];

  result.allocation = describe_allocation(scenario, chosen, budget);
  const double total = result.allocation.total_rate_increase;
  for (std::size_t i = 0; i < n; ++i) {
    const double others_now = total - result.allocation.rate_increase[i];
    result.payments.push_back(std::max(without[i] - others_now, 0.0));
  }
  return result;
}

}  // namespace relay
