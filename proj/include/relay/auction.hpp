#pragma once

// Share auction for relay power: proportional allocation with a reserve bid,
// per-unit payments on SNR gain or on power, and the users' best responses.

#include <string_view>
#include <vector>

#include "relay/channel.hpp"

namespace relay {

enum class AuctionKind { Snr, Power };

std::string_view to_string(AuctionKind kind);
AuctionKind parse_auction_kind(std::string_view text);

struct AuctionParams {
  AuctionKind kind = AuctionKind::Snr;
  double price = 1.0;        // pi > 0
  double reserve_bid = 1.0;  // beta > 0

  void validate() const;
};

/// Non-negative finite bids, one per user.
class BidProfile {
 public:
  BidProfile() = default;
  explicit BidProfile(std::vector<double> bids);
  static BidProfile uniform(std::size_t users, double bid);

  const std::vector<double>& bids() const { return bids_; }
  std::size_t size() const { return bids_.size(); }
  double operator[](std::size_t i) const { return bids_[i]; }
  double total() const;

 private:
  std::vector<double> bids_;
};

struct Allocation {
  std::vector<double> powers;  // watts per user

  double total() const;
};

/// Outcome of a best-response computation. For a response factor the value
/// is f with bid = f * (others + beta); for a bid it is the bid itself.
class BestResponseValue {
 public:
  enum class Kind { Zero, Finite, Infinite };

  static BestResponseValue zero() { return {Kind::Zero, 0.0}; }
  static BestResponseValue finite(double v);
  static BestResponseValue infinite() { return {Kind::Infinite, 0.0}; }

  Kind kind() const { return kind_; }
  bool is_infinite() const { return kind_ == Kind::Infinite; }
  /// 0 for Zero; the stored value for Finite. Throws for Infinite.
  double value() const;

  BestResponseValue scaled(double factor) const;

 private:
  BestResponseValue(Kind kind, double v) : kind_(kind), value_(v) {}
  Kind kind_;
  double value_;
};

struct CriticalPrices {
  double pi_lower = 0.0;  // below: demand exceeds what the full budget buys
  double pi_hat = 0.0;    // at or above: the relay is not worth paying for

  bool regular() const { return pi_hat > pi_lower; }
};

Allocation allocate(const BidProfile& bids, double reserve_bid,
                    double budget_w);

double payment(AuctionKind kind, double price, const UserLink& link,
               double relay_power_w, const SystemParams& sys);

/// Rate increase minus payment for bid `bid` against opponents' bid total
/// `others`.
double payoff(const UserLink& link, double bid, double others,
              const AuctionParams& params, double budget_w,
              const SystemParams& sys);

/// Payoff written directly in terms of the allocated relay power.
double payoff_at_power(const UserLink& link, double relay_power_w,
                       AuctionKind kind, double price, const SystemParams& sys);

// SNR auction -------------------------------------------------------------

/// pi(1+G) - (W/2)(log2(2 pi ln2 (1+G)^2 / W) + 1/ln2): the best payoff the
/// user could reach at price pi if the relay budget were unlimited.
double g_snr(const UserLink& link, double price, const SystemParams& sys);

/// Price where g_snr is minimal and the unconstrained SNR demand hits zero.
double g_snr_stationary_price(const UserLink& link, const SystemParams& sys);

CriticalPrices snr_critical_prices(const UserLink& link, double budget_w,
                                   const SystemParams& sys);

BestResponseValue snr_best_response_factor(const UserLink& link, double price,
                                           double budget_w,
                                           const SystemParams& sys);
BestResponseValue snr_best_response_factor(const UserLink& link, double price,
                                           double budget_w,
                                           const SystemParams& sys,
                                           const CriticalPrices& critical);

// Power auction -----------------------------------------------------------

/// Exact-model best response factor from a 1-D search over allocated power.
BestResponseValue power_best_response_factor(const UserLink& link,
                                             double price, double budget_w,
                                             const SystemParams& sys);

CriticalPrices power_critical_prices(const UserLink& link, double budget_w,
                                     const SystemParams& sys);

// Both auctions -----------------------------------------------------------

BestResponseValue best_response_factor(const UserLink& link,
                                       const AuctionParams& params,
                                       double budget_w,
                                       const SystemParams& sys);

/// Best bid against an opponents' bid total: factor * (others + beta).
BestResponseValue best_response(const UserLink& link, double others,
                                const AuctionParams& params, double budget_w,
                                const SystemParams& sys);

bool is_snr_regular(const NetworkScenario& scenario);
bool is_power_regular(const NetworkScenario& scenario);
bool is_regular(const NetworkScenario& scenario, AuctionKind kind);

}  // namespace relay
