#pragma once

// Best-response dynamics and equilibrium computation for the share auctions.

#include <optional>
#include <vector>

#include "relay/auction.hpp"
#include "relay/channel.hpp"

namespace relay {

struct IterationOptions {
  double tol = 1e-10;  // relative, on the max-norm of the bid change
  int max_iter = 100000;
  double divergence_cap = 1e12;  // bids above cap * beta count as divergence
  bool keep_profiles = true;
};

struct IterationTrace {
  std::vector<std::vector<double>> profiles;  // b(0), b(1), ... if kept
  std::vector<double> residuals;              // max |b(t) - b(t-1)|
  std::vector<double> final_bids;
  bool converged = false;
  bool diverged = false;
  int iterations() const { return static_cast<int>(residuals.size()); }
};

struct EquilibriumResult {
  AuctionParams params;
  BidProfile bids;
  Allocation allocation;
  std::vector<double> rate_increase;  // bits/s
  std::vector<double> delta_snr;
  std::vector<double> payments;
  std::vector<double> payoffs;
  double utilization = 0.0;  // sum of powers / budget
  int iterations = 0;
  std::optional<double> geometric_rate;

  double total_rate_increase() const;
};

struct PriceSearchResult {
  double price = 0.0;
  double utilization = 0.0;
  bool feasible = false;
};

/// Best-response factors f_i at one price. Each user's best reply to
/// opponents' bid total B is f_i (B + beta) in both auctions: the SNR auction
/// by its closed form, the power auction because the payoff depends on the
/// bid only through the allocated power.
std::vector<BestResponseValue> response_factors(
    const NetworkScenario& scenario, const AuctionParams& params);

/// Synchronous best-response updates b_i(t) = f_i (sum_{j!=i} b_j(t-1) + beta).
IterationTrace iterate_best_response(const NetworkScenario& scenario,
                                     const AuctionParams& params,
                                     const BidProfile& start,
                                     const IterationOptions& options = {});

/// Unique NE at the given price, or nullopt when none exists.
std::optional<EquilibriumResult> solve_ne(const NetworkScenario& scenario,
                                          const AuctionParams& params);

/// Fills rates, payments and payoffs for a bid profile.
EquilibriumResult evaluate_profile(const NetworkScenario& scenario,
                                   const AuctionParams& params,
                                   const BidProfile& bids);

/// Equilibrium utilization sum_i f_i / (1 + f_i) when an NE exists.
std::optional<double> equilibrium_utilization(
    const std::vector<BestResponseValue>& factors);

/// Price above which an NE exists. Throws ModelError for non-regular
/// scenarios.
double threshold_price(const NetworkScenario& scenario, AuctionKind kind,
                       double rel_tol = 1e-9);

/// Largest price whose NE allocates at least `target` of the budget.
PriceSearchResult calibrate_price(const NetworkScenario& scenario,
                                  AuctionKind kind, double target = 0.99,
                                  double reserve_bid = 1.0);

/// Per-step contraction ratio from a least-squares fit of log residuals over
/// the tail of a converged trace.
double estimate_geometric_rate(const IterationTrace& trace);

struct DeviationCheck {
  bool passed = true;
  double worst_gain = 0.0;  // best payoff improvement found, bits/s
  std::size_t worst_user = 0;
};

/// Scans each user's payoff over [0, 10 b_i + beta] against the others'
/// equilibrium bids.
DeviationCheck check_no_deviation(const NetworkScenario& scenario,
                                  const EquilibriumResult& ne,
                                  int points = 200, double rel_tol = 1e-6);

}  // namespace relay
