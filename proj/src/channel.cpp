#include "relay/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "relay/numeric.hpp"

namespace relay {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void SystemParams::validate() const {
  if (!positive_finite(bandwidth_hz))
    throw ModelError("bandwidth must be positive and finite");
  if (!positive_finite(noise_w))
    throw ModelError("noise power must be positive and finite");
  if (!positive_finite(pathloss_exponent))
    throw ModelError("path-loss exponent must be positive and finite");
}

UserLink::UserLink(int user_id, double source_power_w, double gain_sd,
                   double gain_sr, double gain_rd, const SystemParams& sys)
    : user_id_(user_id),
      source_power_(source_power_w),
      gain_sd_(gain_sd),
      gain_sr_(gain_sr),
      gain_rd_(gain_rd) {
  sys.validate();
  if (!positive_finite(source_power_w))
    throw ModelError("source power must be positive and finite");
  if (!positive_finite(gain_sd) || !positive_finite(gain_sr) ||
      !positive_finite(gain_rd))
    throw ModelError("channel gains must be positive and finite");
  direct_snr_ = source_power_ * gain_sd_ / sys.noise_w;
  source_relay_snr_ = source_power_ * gain_sr_ / sys.noise_w;
  relay_snr_per_watt_ = gain_rd_ / sys.noise_w;
}

void NetworkScenario::validate() const {
  system.validate();
  if (!positive_finite(relay_budget_w))
    throw ModelError("relay budget must be positive and finite");
  if (geometry && geometry->links.size() != users.size())
    throw ModelError("geometry must describe every user");
}

NetworkScenario NetworkScenario::subset(
    const std::vector<std::size_t>& keep) const {
  NetworkScenario out;
  out.relay_budget_w = relay_budget_w;
  out.system = system;
  if (geometry) out.geometry = NetworkGeometry{geometry->relay, {}};
  for (std::size_t i : keep) {
    out.users.push_back(users.at(i));
    if (geometry) out.geometry->links.push_back(geometry->links.at(i));
  }
  return out;
}

NetworkScenario NetworkScenario::with_budget(double budget_w) const {
  NetworkScenario out = *this;
  out.relay_budget_w = budget_w;
  out.validate();
  return out;
}

double path_gain(const Position& a, const Position& b, double exponent) {
  if (!positive_finite(exponent))
    throw ModelError("path-loss exponent must be positive");
  const double d = distance(a, b);
  if (!(d > 0.0)) throw ModelError("zero distance between nodes");
  return std::pow(d, -exponent);
}

NetworkScenario make_geometric_scenario(
    const SystemParams& sys, double relay_budget_w, const Position& relay,
    const std::vector<LinkGeometry>& links,
    const std::vector<double>& source_power_w) {
  if (links.size() != source_power_w.size())
    throw ModelError("one source power per link is required");
  NetworkScenario scenario;
  scenario.system = sys;
  scenario.relay_budget_w = relay_budget_w;
  scenario.geometry = NetworkGeometry{relay, links};
  const double alpha = sys.pathloss_exponent;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& g = links[i];
    scenario.users.emplace_back(static_cast<int>(i), source_power_w[i],
                                path_gain(g.source, g.destination, alpha),
                                path_gain(g.source, relay, alpha),
                                path_gain(relay, g.destination, alpha), sys);
  }
  scenario.validate();
  return scenario;
}

double direct_snr(const UserLink& link, const SystemParams& sys) {
  return link.source_power() * link.gain_sd() / sys.noise_w;
}

double relayed_snr(const UserLink& link, double relay_power_w,
                   const SystemParams& sys) {
  if (!(relay_power_w >= 0.0))
    throw ModelError("relay power must be non-negative");
  if (std::isinf(relay_power_w))
    return link.source_power() * link.gain_sr() / sys.noise_w;
  const double relay_snr = relay_power_w * link.gain_rd() / sys.noise_w;
  const double source_snr = link.source_power() * link.gain_sr() / sys.noise_w;
  return relay_snr * source_snr / (relay_snr + source_snr + 1.0);
}

double relay_power_for_snr(const UserLink& link, double snr,
                           const SystemParams& sys) {
  if (!(snr >= 0.0)) throw ModelError("SNR must be non-negative");
  const double ceiling = link.source_power() * link.gain_sr() / sys.noise_w;
  if (snr >= ceiling) return std::numeric_limits<double>::infinity();
  const double per_watt = link.gain_rd() / sys.noise_w;
  return snr * (ceiling + 1.0) / (per_watt * (ceiling - snr));
}

double direct_rate(const UserLink& link, const SystemParams& sys) {
  return sys.bandwidth_hz * std::log2(1.0 + direct_snr(link, sys));
}

double coop_rate(const UserLink& link, double relay_power_w,
                 const SystemParams& sys) {
  return 0.5 * sys.bandwidth_hz *
         std::log2(1.0 + direct_snr(link, sys) +
                   relayed_snr(link, relay_power_w, sys));
}

double breakeven_snr(const UserLink& link) {
  const double g = link.direct_snr();
  return g * g + g;
}

double rate_increase_at_snr(const UserLink& link, double delta_snr,
                            const SystemParams& sys) {
  // (W/2) log2((1+G+x)/(1+G)^2), written with log1p so the sign flips
  // exactly at x = G^2 + G.
  const double g = link.direct_snr();
  const double excess = (delta_snr - breakeven_snr(link)) / ((1.0 + g) * (1.0 + g));
  if (!(excess > 0.0)) return 0.0;
  return 0.5 * sys.bandwidth_hz * std::log1p(excess) / std::numbers::ln2;
}

double rate_increase(const UserLink& link, double relay_power_w,
                     const SystemParams& sys) {
  return rate_increase_at_snr(link, relayed_snr(link, relay_power_w, sys), sys);
}

double rate_increase_slope(const UserLink& link, double relay_power_w,
                           const SystemParams& sys) {
  const double x = relayed_snr(link, relay_power_w, sys);
  if (!(x > breakeven_snr(link))) return 0.0;
  const double a = link.gain_rd() / sys.noise_w;
  const double b = link.source_power() * link.gain_sr() / sys.noise_w;
  const double denom = relay_power_w * a + b + 1.0;
  const double dx_dp = a * b * (b + 1.0) / (denom * denom);
  return 0.5 * sys.bandwidth_hz / std::numbers::ln2 * dx_dp /
         (1.0 + link.direct_snr() + x);
}

std::optional<double> breakeven_power(const UserLink& link,
                                      const SystemParams& sys) {
  const double target = breakeven_snr(link);
  const double ceiling = link.source_power() * link.gain_sr() / sys.noise_w;
  if (target >= ceiling) return std::nullopt;
  if (target == 0.0) return 0.0;
  const double closed = relay_power_for_snr(link, target, sys);
  if (std::isfinite(closed) && closed >= 0.0) return closed;

  // Fallback when the closed form loses precision near the ceiling.
  double hi = 1.0;
  while (relayed_snr(link, hi, sys) < target) {
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::nullopt;
  }
  return numeric::bisect_root(
      [&](double p) { return relayed_snr(link, p, sys) - target; }, 0.0, hi);
}

}  // namespace relay
