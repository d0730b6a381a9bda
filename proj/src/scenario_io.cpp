#include "relay/scenario_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace relay {

namespace {

using nlohmann::json;

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("malformed JSON: ") + e.what());
  }
}

Position position_from(const json& j) {
  return Position{j.at("x").get<double>(), j.at("y").get<double>()};
}

json position_to(const Position& p) { return {{"x", p.x}, {"y", p.y}}; }

SystemParams system_from(const json& j) {
  SystemParams s;
  s.bandwidth_hz = j.value("bandwidth_hz", s.bandwidth_hz);
  s.noise_w = j.value("noise_w", s.noise_w);
  s.pathloss_exponent = j.value("pathloss_exponent", s.pathloss_exponent);
  s.validate();
  return s;
}

template <class T>
void maybe(const json& j, const char* key, T& field) {
  if (j.contains(key)) j.at(key).get_to(field);
}

void welfare_from(const json& j, WelfareOptions& w) {
  if (!j.contains("welfare")) return;
  const auto& o = j.at("welfare");
  maybe(o, "grid_n", w.grid_n);
  maybe(o, "seeds", w.seeds);
  maybe(o, "refine", w.refine);
}

}  // namespace

NetworkScenario parse_scenario(std::string_view text) {
  const json doc = parse(text);
  try {
    const SystemParams sys = system_from(doc.value("system", json::object()));
    const double budget = doc.at("relay_budget_w").get<double>();
    const auto& users = doc.at("users");
    if (!users.is_array() || users.empty())
      throw ModelError("scenario needs a non-empty user list");

    const bool geometric = users.front().contains("source");
    if (geometric) {
      std::vector<LinkGeometry> links;
      std::vector<double> powers;
      for (const auto& u : users) {
        if (!u.contains("source"))
          throw ModelError("users must all give positions or all give gains");
        links.push_back({position_from(u.at("source")),
                         position_from(u.at("destination"))});
        powers.push_back(u.at("source_power_w").get<double>());
      }
      return make_geometric_scenario(sys, budget,
                                     position_from(doc.at("relay")), links,
                                     powers);
    }
    NetworkScenario s;
    s.system = sys;
    s.relay_budget_w = budget;
    int id = 0;
    for (const auto& u : users) {
      if (u.contains("source"))
        throw ModelError("users must all give positions or all give gains");
      s.users.emplace_back(id++, u.at("source_power_w").get<double>(),
                           u.at("gain_sd").get<double>(),
                           u.at("gain_sr").get<double>(),
                           u.at("gain_rd").get<double>(), sys);
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ModelError(std::string("invalid scenario: ") + e.what());
  }
}

std::string scenario_to_json(const NetworkScenario& scenario) {
  json doc;
  doc["system"] = {{"bandwidth_hz", scenario.system.bandwidth_hz},
                   {"noise_w", scenario.system.noise_w},
                   {"pathloss_exponent", scenario.system.pathloss_exponent}};
  doc["relay_budget_w"] = scenario.relay_budget_w;
  json users = json::array();
  if (scenario.geometry) {
    doc["relay"] = position_to(scenario.geometry->relay);
    for (std::size_t i = 0; i < scenario.size(); ++i) {
      const auto& g = scenario.geometry->links[i];
      users.push_back({{"source_power_w", scenario.users[i].source_power()},
                       {"source", position_to(g.source)},
                       {"destination", position_to(g.destination)}});
    }
  } else {
    for (const auto& u : scenario.users)
      users.push_back({{"source_power_w", u.source_power()},
                       {"gain_sd", u.gain_sd()},
                       {"gain_sr", u.gain_sr()},
                       {"gain_rd", u.gain_rd()}});
  }
  doc["users"] = std::move(users);
  return doc.dump(2);
}

std::optional<AuctionParams> parse_auction_section(std::string_view text) {
  const json doc = parse(text);
  if (!doc.contains("auction")) return std::nullopt;
  const auto& a = doc.at("auction");
  try {
    AuctionParams p;
    p.kind = parse_auction_kind(a.value("kind", std::string("snr")));
    p.price = a.value("price", 0.0);
    p.reserve_bid = a.value("reserve_bid", 1.0);
    return p;
  } catch (const json::exception& e) {
    throw ModelError(std::string("invalid auction section: ") + e.what());
  }
}

TwoUserSweepSpec parse_two_user_spec(std::string_view text) {
  const json doc = parse(text);
  TwoUserSweepSpec s;
  try {
    if (doc.contains("source1")) s.source1 = position_from(doc["source1"]);
    if (doc.contains("source2")) s.source2 = position_from(doc["source2"]);
    if (doc.contains("destination1"))
      s.destination1 = position_from(doc["destination1"]);
    if (doc.contains("destination2"))
      s.destination2 = position_from(doc["destination2"]);
    maybe(doc, "relay_x", s.relay_x);
    maybe(doc, "y_min", s.y_min);
    maybe(doc, "y_max", s.y_max);
    maybe(doc, "step", s.step);
    maybe(doc, "source_power_w", s.source_power_w);
    if (doc.contains("system")) s.system = system_from(doc["system"]);
    maybe(doc, "relay_budget_w", s.relay_budget_w);
    maybe(doc, "reserve_bid", s.reserve_bid);
    maybe(doc, "target_utilization", s.target_utilization);
    maybe(doc, "vcg_delta", s.vcg_delta);
    welfare_from(doc, s.welfare);
  } catch (const json::exception& e) {
    throw ModelError(std::string("invalid two-user spec: ") + e.what());
  }
  s.validate();
  return s;
}

MultiUserSpec parse_multi_user_spec(std::string_view text) {
  const json doc = parse(text);
  MultiUserSpec s;
  try {
    maybe(doc, "users", s.users);
    maybe(doc, "field_min", s.field_min);
    maybe(doc, "field_max", s.field_max);
    if (doc.contains("relay")) s.relay = position_from(doc["relay"]);
    maybe(doc, "budgets_w", s.budgets_w);
    maybe(doc, "topologies", s.topologies);
    maybe(doc, "seed", s.seed);
    maybe(doc, "source_power_w", s.source_power_w);
    if (doc.contains("system")) s.system = system_from(doc["system"]);
    maybe(doc, "reserve_bid", s.reserve_bid);
    maybe(doc, "target_utilization", s.target_utilization);
    if (doc.contains("oracles")) s.oracles = doc["oracles"].get<bool>();
    welfare_from(doc, s.welfare);
  } catch (const json::exception& e) {
    throw ModelError(std::string("invalid multi-user spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace relay
