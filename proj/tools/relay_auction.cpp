// Command-line front end: experiments, single-scenario equilibria, oracles.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "relay/auction.hpp"
#include "relay/dynamics.hpp"
#include "relay/oracles.hpp"
#include "relay/report.hpp"
#include "relay/scenario_io.hpp"

using namespace relay;
using nlohmann::json;

namespace {

void emit(const std::vector<ReportRow>& rows, const ReportMeta& meta,
          const std::string& out_dir, const std::string& format) {
  const auto fmt = parse_report_format(format);
  if (out_dir.empty()) {
    if (fmt == ReportFormat::Csv)
      write_csv(std::cout, rows, meta);
    else
      write_json(std::cout, rows, meta);
    return;
  }
  std::cerr << "wrote " << emit_report(rows, fmt, out_dir, meta).string() << '\n';
}

json vec(const std::vector<double>& v) { return json(v); }

json describe(const EquilibriumResult& ne) {
  return {{"kind", std::string(to_string(ne.params.kind))},
          {"price", ne.params.price},
          {"reserve_bid", ne.params.reserve_bid},
          {"bids", vec(ne.bids.bids())},
          {"powers_w", vec(ne.allocation.powers)},
          {"rate_increase_bps", vec(ne.rate_increase)},
          {"delta_snr", vec(ne.delta_snr)},
          {"payments", vec(ne.payments)},
          {"payoffs", vec(ne.payoffs)},
          {"utilization", ne.utilization},
          {"iterations", ne.iterations},
          {"geometric_rate",
           ne.geometric_rate ? json(*ne.geometric_rate) : json(nullptr)}};
}

json describe(const OracleAllocation& a) {
  return {{"powers_w", vec(a.powers)},
          {"rate_increase_bps", vec(a.rate_increase)},
          {"delta_snr", vec(a.delta_snr)},
          {"marginal_utility", vec(a.marginal_utility)},
          {"total_rate_increase_bps", a.total_rate_increase},
          {"budget_w", a.budget_used}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Share-auction relay power allocation toolkit"};
  app.require_subcommand(1);

  std::string scenario_path, auction = "snr", out_dir, format = "csv";
  std::optional<double> price, calibrate, step, delta;
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  std::optional<int> topologies, users;
  unsigned threads = 0;

  auto add_common_report = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory (default: stdout)");
    sub->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
  };

  auto* sweep = app.add_subcommand("two-user-sweep", "Relay position sweep");
  sweep->add_option("--scenario", scenario_path, "Sweep spec JSON");
  sweep->add_option("--step", step, "Relay y step in meters");
  sweep->add_option("--grid", grid, "Oracle grid resolution");
  sweep->add_option("--delta", delta, "Oracle budget reduction");
  add_common_report(sweep);

  auto* multi = app.add_subcommand("multi-user", "Random topology experiment");
  multi->add_option("--scenario", scenario_path, "Multi-user spec JSON");
  multi->add_option("--seed", seed, "Topology seed");
  multi->add_option("--topologies", topologies, "Number of topologies");
  multi->add_option("--users", users, "Users per topology");
  multi->add_option("--grid", grid, "Oracle grid resolution");
  add_common_report(multi);

  auto* ne = app.add_subcommand("ne-solve", "Equilibrium of one scenario");
  ne->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  ne->add_option("--auction", auction)->check(CLI::IsMember({"snr", "power"}));
  auto* price_opt = ne->add_option("--price", price, "Fixed price");
  ne->add_option("--calibrate", calibrate, "Target utilization")
      ->excludes(price_opt);

  auto* oracle = app.add_subcommand("oracle", "Centralized benchmark");
  std::string which;
  oracle->add_option("which", which, "efficient, fair or vcg")
      ->required()
      ->check(CLI::IsMember({"efficient", "fair", "vcg"}));
  oracle->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  oracle->add_option("--delta", delta, "Budget reduction (default 0.01)");
  oracle->add_option("--grid", grid, "Grid resolution");

  auto* thresh = app.add_subcommand("threshold-price", "NE existence threshold");
  thresh->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  thresh->add_option("--auction", auction)
      ->check(CLI::IsMember({"snr", "power"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      auto spec = scenario_path.empty()
                      ? TwoUserSweepSpec{}
                      : parse_two_user_spec(read_text_file(scenario_path));
      if (step) spec.step = *step;
      if (grid) spec.welfare.grid_n = *grid;
      if (delta) spec.vcg_delta = *delta;
      const auto rows = run_two_user_sweep(spec, threads);
      emit(rows, {"two_user_sweep", "relay_y_m", 0, ""}, out_dir, format);
    } else if (multi->parsed()) {
      auto spec = scenario_path.empty()
                      ? MultiUserSpec{}
                      : parse_multi_user_spec(read_text_file(scenario_path));
      if (seed) spec.seed = *seed;
      if (topologies) spec.topologies = *topologies;
      if (users) spec.users = *users;
      if (grid) spec.welfare.grid_n = *grid;
      const auto rows = run_multi_user(spec, threads);
      emit(rows, {"multi_user", "relay_budget_w", spec.seed, kTopologyRng},
           out_dir, format);
    } else if (ne->parsed()) {
      const auto text = read_text_file(scenario_path);
      const auto scenario = parse_scenario(text);
      AuctionParams params = parse_auction_section(text).value_or(AuctionParams{});
      if (ne->count("--auction")) params.kind = parse_auction_kind(auction);
      json doc;
      if (price) {
        params.price = *price;
      } else if (calibrate || !(params.price > 0.0)) {
        const auto found = calibrate_price(scenario, params.kind,
                                           calibrate.value_or(0.99),
                                           params.reserve_bid);
        params.price = found.price;
        doc["calibration"] = {{"target", calibrate.value_or(0.99)},
                              {"feasible", found.feasible}};
      }
      const auto result = solve_ne(scenario, params);
      if (result) {
        doc["equilibrium"] = describe(*result);
        doc["no_deviation"] = check_no_deviation(scenario, *result).passed;
      } else {
        doc["equilibrium"] = nullptr;
        doc["reason"] = "no equilibrium at this price";
      }
      std::cout << doc.dump(2) << '\n';
    } else if (oracle->parsed()) {
      const auto scenario = parse_scenario(read_text_file(scenario_path));
      WelfareOptions opts;
      if (grid) opts.grid_n = *grid;
      const double d = delta.value_or(0.01);
      json doc;
      if (which == "efficient") {
        doc = describe(efficient_allocation(scenario, d, opts));
      } else if (which == "fair") {
        doc = describe(fair_allocation(scenario, d));
      } else {
        const auto v = vcg_auction(scenario, d, opts);
        doc = describe(v.allocation);
        doc["payments_bps"] = vec(v.payments);
        doc["welfare_solves"] = v.welfare_solves;
      }
      std::cout << doc.dump(2) << '\n';
    } else if (thresh->parsed()) {
      const auto scenario = parse_scenario(read_text_file(scenario_path));
      const auto kind = parse_auction_kind(auction);
      std::printf("%.12g\n", threshold_price(scenario, kind));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
