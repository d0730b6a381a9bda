#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "relay/dynamics.hpp"
#include "relay/oracles.hpp"
#include "test_support.hpp"

using namespace relay;
using relay::testing::default_system;

namespace {

NetworkScenario two_user(double relay_y, double relay_x = 80.0) {
  const std::vector<LinkGeometry> links{{{200, -25}, {0, -25}},
                                        {{0, 25}, {200, 25}}};
  return make_geometric_scenario(default_system(), 0.1, {relay_x, relay_y},
                                 links, {0.01, 0.01});
}

double sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

// Independent welfare maximum for two users: fine scan of the split with
// the reference rate formula.
double brute_force_two(const NetworkScenario& s, double budget, int cells) {
  double best = 0.0;
  for (int k = 0; k <= cells; ++k) {
    const double p = budget * k / cells;
    best = std::max(best, testing::ref_rate_increase(s.users[0], p, s.system) +
                              testing::ref_rate_increase(s.users[1], budget - p, s.system));
  }
  // Any user alone with the whole budget, or nobody.
  for (const auto& u : s.users)
    best = std::max(best, testing::ref_rate_increase(u, budget, s.system));
  return best;
}

double marginal(const UserLink& u, double x, const SystemParams& sys) {
  return sys.bandwidth_hz / (2 * std::numbers::ln2 * (1 + u.direct_snr() + x));
}

}  // namespace

TEST_CASE("useless relay gives the all-zero allocation") {
  const auto s = two_user(0.0, 5000.0);
  const auto eff = efficient_allocation(s);
  CHECK(eff.total_rate_increase == 0.0);
  CHECK(sum(eff.powers) == 0.0);
  const auto fair = fair_allocation(s);
  CHECK(sum(fair.powers) == 0.0);
  const auto vcg = vcg_auction(s);
  CHECK(vcg.payments == std::vector<double>{0.0, 0.0});
}

TEST_CASE("single user gets the reduced budget or nothing") {
  const auto s = two_user(25.0).subset({1});
  const auto eff = efficient_allocation(s, 0.01);
  CHECK(eff.powers[0] == doctest::Approx(0.099));
  CHECK(eff.budget_used == doctest::Approx(0.099));
  const auto vcg = vcg_auction(s, 0.01);
  CHECK(vcg.payments[0] == 0.0);
  CHECK(vcg.welfare_solves == 2);
  const auto hopeless = testing::scenario_from(
      {testing::link_from_snrs(0, 0.5, 0.5, 10.0, 0.1)}, 0.1);
  CHECK(efficient_allocation(hopeless).powers[0] == 0.0);
}

TEST_CASE("invalid oracle arguments") {
  const auto s = two_user(0.0);
  CHECK_THROWS_AS(efficient_allocation(s, 1.0), ModelError);
  CHECK_THROWS_AS(efficient_allocation(s, -0.1), ModelError);
  CHECK_THROWS_AS(fair_allocation(s, 1.5), ModelError);
  WelfareOptions coarse;
  coarse.grid_n = 8;
  CHECK_THROWS_AS(efficient_allocation(s, 0.01, coarse), ModelError);
}

TEST_CASE("two-user efficient allocation against a brute-force scan") {
  for (double y : {-100.0, -25.0, 0.0, 25.0, 60.0, 140.0}) {
    CAPTURE(y);
    const auto s = two_user(y);
    const auto eff = efficient_allocation(s, 0.01);
    const double brute = brute_force_two(s, 0.099, 200000);
    CHECK(eff.total_rate_increase >= brute * (1 - 1e-9));
    CHECK(eff.total_rate_increase <= brute * (1 + 1e-6) + 1e-6);
    CHECK(sum(eff.powers) <= 0.099 * (1 + 1e-12));
  }
}

TEST_CASE("grid and refined searches agree within 0.1 percent") {
  const auto s = two_user(25.0);
  WelfareOptions grid_only;
  grid_only.refine = false;
  const auto coarse = efficient_allocation(s, 0.01, grid_only);
  const auto fine = efficient_allocation(s, 0.01);
  CHECK(coarse.total_rate_increase == doctest::Approx(fine.total_rate_increase).epsilon(1e-3));
  CHECK(fine.total_rate_increase >= coarse.total_rate_increase);
}

TEST_CASE("three-user grid and multistart search agree") {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 5; ++k) {
    const auto s = testing::random_scenario(rng, 3);
    const auto grid = efficient_allocation(s, 0.01);
    // Same problem through the multistart path: add a fourth user who never
    // benefits.
    auto padded = s;
    padded.users.push_back(testing::link_from_snrs(3, 0.5, 0.5, 1.0, 0.1));
    const auto multi = efficient_allocation(padded, 0.01);
    CHECK(multi.powers[3] == 0.0);
    CHECK(multi.total_rate_increase ==
          doctest::Approx(grid.total_rate_increase).epsilon(1e-6));
  }
}

TEST_CASE("efficient allocation dominates every auction equilibrium") {
  std::mt19937_64 rng(52);
  for (int k = 0; k < 10; ++k) {
    const auto s = testing::random_scenario(rng, 2 + k % 3);
    const auto eff = efficient_allocation(s, 0.0);
    for (auto kind : {AuctionKind::Snr, AuctionKind::Power}) {
      if (!is_regular(s, kind)) continue;
      const auto found = calibrate_price(s, kind, 0.9);
      const auto ne = solve_ne(s, AuctionParams{kind, found.price, 1.0});
      if (!ne) continue;
      CHECK(eff.total_rate_increase >= ne->total_rate_increase() * (1 - 1e-9));
    }
  }
}

TEST_CASE("fair allocation equalizes marginal utility") {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 30; ++k) {
    const auto s = testing::random_scenario(rng, 2 + k % 4);
    const auto fair = fair_allocation(s, 0.01);
    CHECK(sum(fair.powers) <= 0.099 * (1 + 1e-12));
    double common = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(fair.powers[i] >= 0.0);
      if (fair.powers[i] == 0.0) continue;
      CHECK(fair.delta_snr[i] > 0.0);
      CHECK(fair.rate_increase[i] > 0.0);
      const double m = marginal(s.users[i], fair.delta_snr[i], s.system);
      CHECK(fair.marginal_utility[i] == doctest::Approx(m).epsilon(1e-12));
      if (common == 0.0) common = m;
      CHECK(m == doctest::Approx(common).epsilon(1e-8));
    }
  }
}

TEST_CASE("fair allocation with equal direct SNRs gives equal SNR gains") {
  const auto s = testing::scenario_from(
      {testing::link_from_snrs(0, 0.625, 20.0, 60.0, 0.1),
       testing::link_from_snrs(1, 0.625, 35.0, 25.0, 0.1)},
      0.1);
  const auto fair = fair_allocation(s, 0.01);
  REQUIRE(fair.delta_snr[0] > 0.0);
  CHECK(fair.delta_snr[0] == doctest::Approx(fair.delta_snr[1]).epsilon(1e-6));
  CHECK(fair.marginal_utility[0] ==
        doctest::Approx(fair.marginal_utility[1]).epsilon(1e-8));
  CHECK(sum(fair.powers) == doctest::Approx(0.099).epsilon(1e-9));

  // Two-user layout with the relay on the axis of symmetry of the users'
  // distances: both direct SNRs are 0.625.
  const auto geo = two_user(-20.0);
  const auto g = fair_allocation(geo, 0.01);
  if (g.delta_snr[0] > 0.0 && g.delta_snr[1] > 0.0)
    CHECK(g.delta_snr[0] == doctest::Approx(g.delta_snr[1]).epsilon(1e-6));
}

TEST_CASE("iterative dropping against an exhaustive participant search") {
  // A set is valid when its equal-K solution gives every member a positive
  // rate increase. The chosen set must be valid and no valid set may strictly
  // contain it. A larger valid set elsewhere is possible: dropping the only
  // gaining user can let two others gain, which no drop rule reaches.
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> log_direct(std::log(0.05), std::log(3.0));
  std::uniform_real_distribution<double> log_relay(std::log(1.0), std::log(100.0));
  std::uniform_real_distribution<double> ceiling(0.5, 30.0);
  int nonempty = 0;
  int larger_elsewhere = 0;
  for (int k = 0; k < 300; ++k) {
    const int n = 2 + k % 2;
    std::vector<UserLink> links;
    for (int i = 0; i < n; ++i)
      links.push_back(testing::link_from_snrs(i, std::exp(log_direct(rng)), ceiling(rng),
                                              std::exp(log_relay(rng)), 0.1));
    const auto s = testing::scenario_from(links, 0.1);
    const auto chosen = fair_allocation(s, 0.01);
    CAPTURE(k);

    unsigned chosen_mask = 0;
    for (int i = 0; i < n; ++i)
      if (chosen.powers[i] > 0.0) {
        chosen_mask |= 1u << i;
        CHECK(chosen.rate_increase[i] > 0.0);
      }

    std::size_t best_size = 0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::vector<std::size_t> members;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) members.push_back(static_cast<std::size_t>(i));
      const auto sol = fair_allocation_for(s, 0.01, members);
      bool valid = true;
      for (std::size_t i : members) valid = valid && sol.rate_increase[i] > 0.0;
      if (!valid) continue;
      best_size = std::max(best_size, members.size());
      const bool strict_superset = (mask & chosen_mask) == chosen_mask && mask != chosen_mask;
      CHECK_FALSE(strict_superset);
    }
    const auto chosen_size = static_cast<std::size_t>(std::popcount(chosen_mask));
    if (best_size == 0) {
      CHECK(chosen_mask == 0u);
      continue;
    }
    CHECK(chosen_size >= 1u);
    ++nonempty;
    if (best_size > chosen_size) ++larger_elsewhere;
  }
  CHECK(nonempty > 100);
  MESSAGE("scenarios where a larger valid set exists: " << larger_elsewhere << " of " << nonempty);
}

TEST_CASE("VCG payments are non-negative and individually rational") {
  std::mt19937_64 rng(55);
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + k % 3;
    const auto s = testing::random_scenario(rng, n);
    const auto vcg = vcg_auction(s, 0.01);
    CHECK(vcg.welfare_solves == n + 1);
    const auto eff = efficient_allocation(s, 0.01);
    CHECK(vcg.allocation.total_rate_increase >= eff.total_rate_increase * (1 - 1e-12));
    for (int i = 0; i < n; ++i) {
      CHECK(vcg.payments[i] >= 0.0);
      CHECK(vcg.payments[i] <= vcg.allocation.rate_increase[i] * (1 + 1e-9) + 1e-6);
    }
  }
}

TEST_CASE("VCG charges nothing to a user the relay ignores") {
  std::mt19937_64 rng(56);
  for (int k = 0; k < 10; ++k) {
    auto s = testing::random_scenario(rng, 2);
    s.users.push_back(testing::link_from_snrs(2, 0.5, 0.5, 10.0, 0.1));
    const auto vcg = vcg_auction(s, 0.01);
    CHECK(vcg.allocation.powers[2] == 0.0);
    CHECK(vcg.payments[2] == 0.0);
    // Removing that user leaves welfare unchanged.
    const auto without = efficient_allocation(s.subset({0, 1}), 0.01);
    CHECK(without.total_rate_increase ==
          doctest::Approx(vcg.allocation.total_rate_increase).epsilon(1e-9));
  }
}

TEST_CASE("VCG payment equals the externality on a two-user layout") {
  const auto s = two_user(0.0);
  const auto vcg = vcg_auction(s, 0.01);
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t other = 1 - i;
    const double alone = rate_increase(s.users[other], 0.099, s.system);
    const double expected = alone - vcg.allocation.rate_increase[other];
    CHECK(vcg.payments[i] == doctest::Approx(std::max(expected, 0.0)).epsilon(1e-9));
  }
}
