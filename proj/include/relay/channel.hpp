#pragma once

// Amplify-and-forward link model: geometry, path loss, SNR and rates for
// one relay shared by a set of source-destination pairs.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relay {

/// Raised when a model object is constructed from invalid inputs.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
};

double distance(const Position& a, const Position& b);

struct SystemParams {
  double bandwidth_hz = 1e6;
  double noise_w = 1e-11;  // sigma^2, shared by every link
  double pathloss_exponent = 4.0;

  void validate() const;
};

/// Node positions of one user, kept when gains were derived from geometry.
struct LinkGeometry {
  Position source;
  Position destination;
};

/// One source-destination pair as seen through the relay.
class UserLink {
 public:
  UserLink(int user_id, double source_power_w, double gain_sd, double gain_sr,
           double gain_rd, const SystemParams& sys);

  int user_id() const { return user_id_; }
  double source_power() const { return source_power_; }
  double gain_sd() const { return gain_sd_; }
  double gain_sr() const { return gain_sr_; }
  double gain_rd() const { return gain_rd_; }

  /// Direct SNR P_s G_sd / sigma^2, cached at construction.
  double direct_snr() const { return direct_snr_; }
  /// P_s G_sr / sigma^2: the relayed SNR approaches this as relay power grows.
  double relayed_snr_ceiling() const { return source_relay_snr_; }
  /// G_rd / sigma^2, the relay-to-destination SNR per watt of relay power.
  double relay_snr_per_watt() const { return relay_snr_per_watt_; }

 private:
  int user_id_;
  double source_power_;
  double gain_sd_;
  double gain_sr_;
  double gain_rd_;
  double direct_snr_;
  double source_relay_snr_;
  double relay_snr_per_watt_;
};

struct NetworkGeometry {
  Position relay;
  std::vector<LinkGeometry> links;  // parallel to NetworkScenario::users
};

struct NetworkScenario {
  std::vector<UserLink> users;
  double relay_budget_w = 0.1;
  SystemParams system;
  std::optional<NetworkGeometry> geometry;

  void validate() const;
  std::size_t size() const { return users.size(); }
  /// Copy with the users at `keep` only (ids preserved).
  NetworkScenario subset(const std::vector<std::size_t>& keep) const;
  NetworkScenario with_budget(double budget_w) const;
};

/// Gains derived from positions as distance^(-exponent).
NetworkScenario make_geometric_scenario(const SystemParams& sys,
                                        double relay_budget_w,
                                        const Position& relay,
                                        const std::vector<LinkGeometry>& links,
                                        const std::vector<double>& source_power_w);

double path_gain(const Position& a, const Position& b, double exponent);

double direct_snr(const UserLink& link, const SystemParams& sys);

/// Relayed SNR at the destination (the SNR increase the relay provides).
double relayed_snr(const UserLink& link, double relay_power_w,
                   const SystemParams& sys);

/// Relay power needed for relayed SNR `snr`; +inf when snr is at or above the
/// ceiling.
double relay_power_for_snr(const UserLink& link, double snr,
                           const SystemParams& sys);

double direct_rate(const UserLink& link, const SystemParams& sys);
double coop_rate(const UserLink& link, double relay_power_w,
                 const SystemParams& sys);

/// max(coop_rate - direct_rate, 0), in bits/s.
double rate_increase(const UserLink& link, double relay_power_w,
                     const SystemParams& sys);

/// Rate increase as a function of the relayed SNR rather than relay power.
double rate_increase_at_snr(const UserLink& link, double delta_snr,
                            const SystemParams& sys);

/// d(rate_increase)/d(relay power) in bits/s per watt; 0 where the rate
/// increase is clamped at zero.
double rate_increase_slope(const UserLink& link, double relay_power_w,
                           const SystemParams& sys);

/// Smallest relay power at which cooperation stops losing rate; nullopt when
/// the relayed SNR ceiling is below the break-even SNR.
std::optional<double> breakeven_power(const UserLink& link,
                                      const SystemParams& sys);

/// Relayed SNR at which coop_rate equals direct_rate: Gamma^2 + Gamma.
double breakeven_snr(const UserLink& link);

}  // namespace relay
