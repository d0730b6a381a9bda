#pragma once

// The two-user relay-position sweep and the random multi-user topologies,
// plus the rows they report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relay/auction.hpp"
#include "relay/channel.hpp"
#include "relay/dynamics.hpp"
#include "relay/oracles.hpp"

namespace relay {

struct TwoUserSweepSpec {
  Position source1{200.0, -25.0};
  Position source2{0.0, 25.0};
  Position destination1{0.0, -25.0};
  Position destination2{200.0, 25.0};
  double relay_x = 80.0;
  double y_min = -200.0;
  double y_max = 200.0;
  double step = 5.0;
  double source_power_w = 0.01;
  SystemParams system;  // W = 1 MHz, sigma^2 = 1e-11 W, exponent 4
  double relay_budget_w = 0.1;
  double reserve_bid = 1.0;
  double target_utilization = 0.99;
  // The VCG comparison runs on the whole budget; the auctions never reach it.
  double vcg_delta = 0.0;
  WelfareOptions welfare;

  void validate() const;
  std::vector<double> relay_positions() const;
};

struct MultiUserSpec {
  int users = 20;
  double field_min = -150.0;
  double field_max = 150.0;
  Position relay{0.0, 0.0};
  std::vector<double> budgets_w{0.04, 0.1, 0.3, 1.0};
  int topologies = 100;
  std::uint64_t seed = 1;
  double source_power_w = 0.01;
  SystemParams system;
  double reserve_bid = 1.0;
  double target_utilization = 0.99;
  // Efficient/VCG oracle columns; unset means on only for up to 3 users.
  std::optional<bool> oracles;
  WelfareOptions welfare;

  void validate() const;
  bool oracles_enabled() const;
};

/// Identifies the topology generator in report metadata.
inline constexpr const char* kTopologyRng = "mt19937_64/seed_seq(seed,topology)/u53";

/// One mechanism's outcome at one sweep point. Rates are in bits/s/Hz.
struct MechanismResult {
  std::string name;
  double total = 0.0;
  std::vector<double> per_user;
  double utilization = 0.0;
  double price = 0.0;     // 0 for the oracles
  double variance = 0.0;  // over users with a positive increase
  bool feasible = true;   // price calibration reached the target
  bool ne_check = true;   // no-deviation scan passed (oracles: true)

  bool operator==(const MechanismResult&) const = default;
};

struct ReportRow {
  double coordinate = 0.0;  // relay y (m) or relay budget (W)
  std::vector<MechanismResult> mechanisms;

  const MechanismResult& mechanism(const std::string& name) const;
  bool operator==(const ReportRow&) const = default;
};

NetworkScenario build_two_user_scenario(const TwoUserSweepSpec& spec,
                                        double relay_y);

/// Topology `index` of the multi-user experiment with the given budget. The
/// node positions depend only on (seed, index).
NetworkScenario build_topology(const MultiUserSpec& spec, int index,
                               double budget_w);

/// Auction outcome at the price chosen by the utilization rule.
MechanismResult run_calibrated_auction(const NetworkScenario& scenario,
                                       AuctionKind kind, double reserve_bid,
                                       double target_utilization);

MechanismResult summarize_oracle(const std::string& name,
                                 const NetworkScenario& scenario,
                                 const OracleAllocation& allocation);

/// Rows ordered by relay y: mechanisms "vcg", "power", "snr".
std::vector<ReportRow> run_two_user_sweep(const TwoUserSweepSpec& spec,
                                          unsigned threads = 0);

/// Rows ordered by budget: "power" and "snr" averaged over topologies, plus
/// "efficient" when oracles are enabled.
std::vector<ReportRow> run_multi_user(const MultiUserSpec& spec,
                                      unsigned threads = 0);

/// Population variance of the strictly positive entries; 0 for fewer than 2.
double positive_increase_variance(const std::vector<double>& values);

}  // namespace relay
