#pragma once

// Centralized benchmarks with full channel knowledge: the efficient and fair
// allocations of relay power and the VCG auction built on the efficient one.

#include <vector>

#include "relay/channel.hpp"

namespace relay {

struct OracleAllocation {
  std::vector<double> powers;          // watts
  std::vector<double> rate_increase;   // bits/s
  std::vector<double> delta_snr;
  /// dRate/dSNR for users with a positive SNR gain, 0 otherwise.
  std::vector<double> marginal_utility;
  double total_rate_increase = 0.0;
  double budget_used = 0.0;  // budget the search was allowed, P (1 - delta)
};

struct VcgResult {
  OracleAllocation allocation;
  std::vector<double> payments;  // bits/s
  int welfare_solves = 0;        // I + 1
};

struct WelfareOptions {
  int grid_n = 4096;       // grid steps along each budget split
  int seeds = 20;          // multistart seeds when there are more than 3 users
  bool refine = true;      // pairwise power-transfer polishing after the grid
};

/// Maximizes the total rate increase over {p >= 0, sum p <= P (1 - delta)}.
/// Exhaustive grid for up to three users, multistart pairwise refinement
/// beyond that. Users left with no rate increase get zero power.
OracleAllocation efficient_allocation(const NetworkScenario& scenario,
                                      double delta = 0.01,
                                      const WelfareOptions& options = {});

/// Equal marginal utility dRate/dSNR across participating users, with the
/// common marginal as small as the budget P (1 - delta) allows.
OracleAllocation fair_allocation(const NetworkScenario& scenario,
                                 double delta = 0.01);

/// Equal-marginal allocation for a fixed participant set (no dropping).
OracleAllocation fair_allocation_for(const NetworkScenario& scenario,
                                     double delta,
                                     const std::vector<std::size_t>& participants);

/// Efficient allocation plus Clarke pivot payments.
VcgResult vcg_auction(const NetworkScenario& scenario, double delta = 0.01,
                      const WelfareOptions& options = {});

/// Builds an OracleAllocation (rates, SNR, marginals) from powers.
OracleAllocation describe_allocation(const NetworkScenario& scenario,
                                     std::vector<double> powers,
                                     double budget_used);

}  // namespace relay
