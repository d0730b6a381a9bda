#pragma once

// JSON scenario and experiment-spec files. All quantities are SI.
//
// Scenario:
//   {
//     "system": {"bandwidth_hz": 1e6, "noise_w": 1e-11, "pathloss_exponent": 4},
//     "relay_budget_w": 0.1,
//     "relay": {"x": 80, "y": 25},              // needed with positions
//     "users": [
//       {"source_power_w": 0.01, "source": {"x": 200, "y": -25},
//        "destination": {"x": 0, "y": -25}},
//       {"source_power_w": 0.01, "gain_sd": 6.25e-10, "gain_sr": 2.4e-8,
//        "gain_rd": 4.8e-9}
//     ],
//     "auction": {"kind": "snr", "price": 40000, "reserve_bid": 1}
//   }
//
// Users either all carry positions or all carry gains. Spec files hold the
// fields of TwoUserSweepSpec / MultiUserSpec; missing keys keep defaults.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "relay/auction.hpp"
#include "relay/channel.hpp"
#include "relay/experiments.hpp"

namespace relay {

NetworkScenario parse_scenario(std::string_view text);
std::string scenario_to_json(const NetworkScenario& scenario);

/// The optional "auction" section of a scenario file.
std::optional<AuctionParams> parse_auction_section(std::string_view text);

TwoUserSweepSpec parse_two_user_spec(std::string_view text);
MultiUserSpec parse_multi_user_spec(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace relay
