#include "relay/auction.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "relay/numeric.hpp"

namespace relay {

namespace {

constexpr double kLn2 = std::numbers::ln2;

}  // namespace

std::string_view to_string(AuctionKind kind) {
  return kind == AuctionKind::Snr ? "snr" : "power";
}

AuctionKind parse_auction_kind(std::string_view text) {
  if (text == "snr") return AuctionKind::Snr;
  if (text == "power") return AuctionKind::Power;
  throw ModelError("unknown auction kind: " + std::string(text));
}

void AuctionParams::validate() const {
  if (!(std::isfinite(price) && price > 0.0))
    throw ModelError("auction price must be positive and finite");
  if (!(std::isfinite(reserve_bid) && reserve_bid > 0.0))
    throw ModelError("reserve bid must be positive and finite");
}

BidProfile::BidProfile(std::vector<double> bids) : bids_(std::move(bids)) {
  for (double b : bids_)
    if (!(std::isfinite(b) && b >= 0.0))
      throw ModelError("bids must be finite and non-negative");
}

BidProfile BidProfile::uniform(std::size_t users, double bid) {
  return BidProfile(std::vector<double>(users, bid));
}

double BidProfile::total() const {
  return std::accumulate(bids_.begin(), bids_.end(), 0.0);
}

double Allocation::total() const {
  return std::accumulate(powers.begin(), powers.end(), 0.0);
}

BestResponseValue BestResponseValue::finite(double v) {
  if (!(std::isfinite(v) && v >= 0.0))
    throw std::invalid_argument("finite best response must be >= 0");
  return v == 0.0 ? zero() : BestResponseValue{Kind::Finite, v};
}

double BestResponseValue::value() const {
  if (kind_ == Kind::Infinite)
    throw std::logic_error("infinite best response has no value");
  return value_;
}

BestResponseValue BestResponseValue::scaled(double factor) const {
  if (kind_ != Kind::Finite) return *this;
  return finite(value_ * factor);
}

Allocation allocate(const BidProfile& bids, double reserve_bid,
                    double budget_w) {
  if (!(reserve_bid > 0.0)) throw ModelError("reserve bid must be positive");
  if (!(budget_w > 0.0)) throw ModelError("relay budget must be positive");
  const double denom = bids.total() + reserve_bid;
  Allocation out;
  out.powers.reserve(bids.size());
  for (double b : bids.bids()) out.powers.push_back(b / denom * budget_w);
  return out;
}

double payment(AuctionKind kind, double price, const UserLink& link,
               double relay_power_w, const SystemParams& sys) {
  if (kind == AuctionKind::Snr)
    return price * relayed_snr(link, relay_power_w, sys);
  if (!(relay_power_w >= 0.0))
    throw ModelError("relay power must be non-negative");
  return price * relay_power_w;
}

double payoff_at_power(const UserLink& link, double relay_power_w,
                       AuctionKind kind, double price,
                       const SystemParams& sys) {
  return rate_increase(link, relay_power_w, sys) -
         payment(kind, price, link, relay_power_w, sys);
}

double payoff(const UserLink& link, double bid, double others,
              const AuctionParams& params, double budget_w,
              const SystemParams& sys) {
  if (!(bid >= 0.0) || !(others >= 0.0))
    throw ModelError("bids must be non-negative");
  const double power = bid / (bid + others + params.reserve_bid) * budget_w;
  return payoff_at_power(link, power, params.kind, params.price, sys);
}

// SNR auction -------------------------------------------------------------

double g_snr(const UserLink& link, double price, const SystemParams& sys) {
  const double w = sys.bandwidth_hz;
  const double one_g = 1.0 + link.direct_snr();
  return price * one_g -
         0.5 * w *
             (std::log2(2.0 * price * kLn2 * one_g * one_g / w) + 1.0 / kLn2);
}

double g_snr_stationary_price(const UserLink& link, const SystemParams& sys) {
  return sys.bandwidth_hz / (2.0 * kLn2 * (1.0 + link.direct_snr()));
}

namespace {

// Corner with no positive root of g_snr: +inf if some payoff stays positive
// at every scanned price, else 0.
double pi_hat_by_scan(const UserLink& link, double budget_w,
                      const SystemParams& sys) {
  const double centre = g_snr_stationary_price(link, sys);
  constexpr int kPowers = 64;
  for (int k = -40; k <= 40; ++k) {
    const double price = centre * std::ldexp(1.0, k);
    bool positive = false;
    for (int j = 1; j <= kPowers && !positive; ++j) {
      const double p = budget_w * j / kPowers;
      positive = payoff_at_power(link, p, AuctionKind::Snr, price, sys) > 0.0;
    }
    if (!positive) return 0.0;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

CriticalPrices snr_critical_prices(const UserLink& link, double budget_w,
                                   const SystemParams& sys) {
  const double w = sys.bandwidth_hz;
  const double g = link.direct_snr();
  const double max_gain = relayed_snr(link, budget_w, sys);

  CriticalPrices out;
  out.pi_lower = w / (2.0 * kLn2 * (1.0 + g + max_gain));

  // g_snr is convex in the price, tends to +inf as price -> 0, and is
  // minimal at the stationary price, so the smallest root lies to its left.
  const double stationary = g_snr_stationary_price(link, sys);
  auto fn = [&](double price) { return g_snr(link, price, sys); };
  if (fn(stationary) > 0.0) {
    out.pi_hat = pi_hat_by_scan(link, budget_w, sys);
    return out;
  }
  double lo = 1e-12 * stationary;
  for (int i = 0; fn(lo) <= 0.0; ++i) {
    if (i > 20)
      throw numeric::RootFindingError("g_snr: no positive value near zero");
    lo *= 1e-3;
  }
  out.pi_hat = numeric::bisect_root(fn, lo, stationary, 1e-12);
  return out;
}

BestResponseValue snr_best_response_factor(const UserLink& link, double price,
                                           double budget_w,
                                           const SystemParams& sys,
                                           const CriticalPrices& critical) {
  if (!(price > 0.0)) throw ModelError("price must be positive");
  if (!critical.regular()) {
    if (price < critical.pi_hat) return BestResponseValue::infinite();
    return BestResponseValue::zero();
  }
  if (price <= critical.pi_lower) return BestResponseValue::infinite();
  if (price >= critical.pi_hat) return BestResponseValue::zero();

  // Desired SNR gain W/(2 pi ln2) - 1 - G, mapped to the share of the budget
  // through the inverse of the relayed-SNR curve.
  const double demand =
      sys.bandwidth_hz / (2.0 * price * kLn2) - 1.0 - link.direct_snr();
  const double a = link.gain_rd() / sys.noise_w;
  const double b = link.source_power() * link.gain_sr() / sys.noise_w;
  const double denom =
      budget_w * a * b / demand - (b + budget_w * a + 1.0);
  if (!(denom > 0.0)) return BestResponseValue::infinite();
  return BestResponseValue::finite((b + 1.0) / denom);
}

BestResponseValue snr_best_response_factor(const UserLink& link, double price,
                                           double budget_w,
                                           const SystemParams& sys) {
  return snr_best_response_factor(link, price, budget_w, sys,
                                  snr_critical_prices(link, budget_w, sys));
}

// Power auction -----------------------------------------------------------

BestResponseValue power_best_response_factor(const UserLink& link,
                                             double price, double budget_w,
                                             const SystemParams& sys) {
  if (!(price > 0.0)) throw ModelError("price must be positive");
  const auto kink = breakeven_power(link, sys);
  if (!kink || *kink >= budget_w) return BestResponseValue::zero();

  // Payoff is -price*p below the kink and concave above it, so searching
  // [kink, budget] is enough; bid = f (others + beta) with f = p / (P - p).
  auto objective = [&](double p) {
    return rate_increase(link, p, sys) - price * p;
  };
  const auto best = numeric::golden_section_max(objective, *kink, budget_w);
  if (!(best.value > 0.0)) return BestResponseValue::zero();
  if (!(rate_increase_slope(link, budget_w, sys) < price))
    return BestResponseValue::infinite();
  // A positive payoff puts the slope just above the kink over the price, so
  // the optimum is the interior point where the slope falls to the price.
  // Solving for it directly keeps P/(P - p) accurate near the budget.
  auto excess = [&](double p) {
    return rate_increase_slope(link, p, sys) - price;
  };
  const double lo = std::nextafter(*kink, budget_w);
  const double p = excess(lo) > 0.0
                       ? numeric::bisect_root(excess, lo, budget_w, 1e-15)
                       : best.x;
  if (!(p < budget_w)) return BestResponseValue::infinite();
  return BestResponseValue::finite(p / (budget_w - p));
}

CriticalPrices power_critical_prices(const UserLink& link, double budget_w,
                                     const SystemParams& sys) {
  const auto kink = breakeven_power(link, sys);
  if (!kink || *kink >= budget_w) return {};

  CriticalPrices out;
  out.pi_lower = rate_increase_slope(link, budget_w, sys);

  auto unprofitable = [&](double price) {
    auto objective = [&](double p) {
      return rate_increase(link, p, sys) - price * p;
    };
    return numeric::golden_section_max(objective, *kink, budget_w).value <= 0.0;
  };
  // Concavity above the kink bounds the average gain by the slope there.
  double hi = rate_increase_slope(link, std::nextafter(*kink, budget_w), sys);
  if (!(hi > 0.0)) hi = rate_increase(link, budget_w, sys) / budget_w;
  for (int i = 0; !unprofitable(hi); ++i) {
    if (i > 200)
      throw numeric::RootFindingError("power_critical_prices: no bracket");
    hi *= 2.0;
  }
  out.pi_hat = numeric::bisect_predicate(unprofitable, 0.0, hi, 1e-10);
  return out;
}

// Both auctions -----------------------------------------------------------

BestResponseValue best_response_factor(const UserLink& link,
                                       const AuctionParams& params,
                                       double budget_w,
                                       const SystemParams& sys) {
  params.validate();
  if (params.kind == AuctionKind::Snr)
    return snr_best_response_factor(link, params.price, budget_w, sys);
  return power_best_response_factor(link, params.price, budget_w, sys);
}

BestResponseValue best_response(const UserLink& link, double others,
                                const AuctionParams& params, double budget_w,
                                const SystemParams& sys) {
  if (!(others >= 0.0)) throw ModelError("opponent bids must be >= 0");
  return best_response_factor(link, params, budget_w, sys)
      .scaled(others + params.reserve_bid);
}

bool is_snr_regular(const NetworkScenario& scenario) {
  for (const auto& u : scenario.users)
    if (snr_critical_prices(u, scenario.relay_budget_w, scenario.system)
            .regular())
      return true;
  return false;
}

bool is_power_regular(const NetworkScenario& scenario) {
  for (const auto& u : scenario.users)
    if (power_critical_prices(u, scenario.relay_budget_w, scenario.system)
            .regular())
      return true;
  return false;
}

bool is_regular(const NetworkScenario& scenario, AuctionKind kind) {
  return kind == AuctionKind::Snr ? is_snr_regular(scenario)
                                  : is_power_regular(scenario);
}

}  // namespace relay
