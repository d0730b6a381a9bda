#include <doctest.h>

#include <cmath>
#include <string>

#include "relay/experiments.hpp"

using namespace relay;

namespace {

TwoUserSweepSpec coarse_sweep(double step = 25.0) {
  TwoUserSweepSpec spec;
  spec.step = step;
  return spec;
}

MultiUserSpec small_multi() {
  MultiUserSpec spec;
  spec.users = 3;
  spec.topologies = 4;
  spec.budgets_w = {0.04, 0.1, 0.3};
  spec.seed = 7;
  return spec;
}

}  // namespace

TEST_CASE("two-user scenario gains") {
  const TwoUserSweepSpec spec;
  const auto at0 = build_two_user_scenario(spec, 0.0);
  REQUIRE(at0.size() == 2);
  for (const auto& u : at0.users) CHECK(u.direct_snr() == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(at0.relay_budget_w == 0.1);

  const auto at25 = build_two_user_scenario(spec, 25.0);
  CHECK(at25.users[1].gain_sr() == doctest::Approx(std::pow(80.0, -4)).epsilon(1e-12));
  CHECK(at25.users[1].gain_rd() == doctest::Approx(std::pow(120.0, -4)).epsilon(1e-12));
  CHECK(at25.users[0].gain_sd() == doctest::Approx(std::pow(200.0, -4)).epsilon(1e-12));
}

TEST_CASE("sweep positions and spec validation") {
  const TwoUserSweepSpec spec;
  const auto ys = spec.relay_positions();
  CHECK(ys.size() == 81u);
  CHECK(ys.front() == -200.0);
  CHECK(ys.back() == 200.0);
  CHECK(ys[45] == 25.0);

  auto bad = spec;
  bad.step = 0.0;
  CHECK_THROWS_AS(bad.validate(), ModelError);
  bad = spec;
  bad.y_min = 10.0;
  bad.y_max = -10.0;
  CHECK_THROWS_AS(bad.validate(), ModelError);
  bad = spec;
  bad.target_utilization = 1.0;
  CHECK_THROWS_AS(bad.validate(), ModelError);

  MultiUserSpec multi;
  CHECK_FALSE(multi.oracles_enabled());
  multi.users = 3;
  CHECK(multi.oracles_enabled());
  multi.oracles = false;
  CHECK_FALSE(multi.oracles_enabled());
  multi.topologies = 0;
  CHECK_THROWS_AS(multi.validate(), ModelError);
  multi = MultiUserSpec{};
  multi.budgets_w.clear();
  CHECK_THROWS_AS(multi.validate(), ModelError);
}

TEST_CASE("positive-increase variance") {
  CHECK(positive_increase_variance({1.0, 1.0, 0.0}) == 0.0);
  CHECK(positive_increase_variance({0.0, 0.0, 0.0}) == 0.0);
  CHECK(positive_increase_variance({0.5, 1.5, 0.0}) == doctest::Approx(0.25));
  CHECK(positive_increase_variance({2.0}) == 0.0);
  CHECK(positive_increase_variance({}) == 0.0);
}

TEST_CASE("two-user sweep rows") {
  const auto spec = coarse_sweep();
  const auto rows = run_two_user_sweep(spec);
  REQUIRE(rows.size() == spec.relay_positions().size());
  for (const auto& row : rows) {
    CAPTURE(row.coordinate);
    REQUIRE(row.mechanisms.size() == 3u);
    CHECK(row.mechanisms[0].name == "vcg");
    CHECK(row.mechanisms[1].name == "power");
    CHECK(row.mechanisms[2].name == "snr");
    const auto& vcg = row.mechanism("vcg");
    for (const auto& m : row.mechanisms) {
      REQUIRE(m.per_user.size() == 2u);
      for (double v : m.per_user) CHECK(v >= 0.0);
      CHECK(m.total == doctest::Approx(m.per_user[0] + m.per_user[1]));
      CHECK(m.ne_check);
      CHECK(m.utilization <= 1.0);
      if (m.name != "vcg") CHECK(m.utilization < 1.0);
      // Auctions never beat the efficient allocation on the full budget.
      CHECK(m.total <= vcg.total * (1 + 1e-9) + 1e-12);
    }
  }
  // Relay far from both users: nothing much to gain.
  CHECK(rows.front().mechanism("vcg").total < 0.05);
  CHECK(rows.back().mechanism("vcg").total < 0.05);
  CHECK_THROWS_AS(rows.front().mechanism("nope"), std::out_of_range);
}

TEST_CASE("two-user sweep is mirror-symmetric with the relay on the symmetry line") {
  // Point symmetry about (100, 0) swaps the users under y -> -y.
  auto spec = coarse_sweep(20.0);
  spec.relay_x = 100.0;
  spec.y_min = -100.0;
  spec.y_max = 100.0;
  for (double y : {-80.0, -25.0, 0.0, 35.0}) {
    const auto a = build_two_user_scenario(spec, y);
    const auto b = build_two_user_scenario(spec, -y);
    CHECK(a.users[0].gain_sr() == doctest::Approx(b.users[1].gain_sr()).epsilon(1e-14));
    CHECK(a.users[0].gain_rd() == doctest::Approx(b.users[1].gain_rd()).epsilon(1e-14));
  }
  const auto rows = run_two_user_sweep(spec);
  const std::size_t n = rows.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& row = rows[k];
    const auto& mirror = rows[n - 1 - k];
    REQUIRE(row.coordinate == -mirror.coordinate);
    for (const char* name : {"vcg", "power", "snr"}) {
      CAPTURE(std::string(name));
      CAPTURE(row.coordinate);
      const auto& m = row.mechanism(name);
      const auto& r = mirror.mechanism(name);
      CHECK(std::fabs(m.per_user[0] - r.per_user[1]) <= 1e-9);
      CHECK(std::fabs(m.per_user[1] - r.per_user[0]) <= 1e-9);
    }
  }
}

TEST_CASE("sweep results do not depend on the thread count") {
  const auto spec = coarse_sweep(50.0);
  const auto one = run_two_user_sweep(spec, 1);
  const auto many = run_two_user_sweep(spec, 4);
  CHECK(one == many);
}

TEST_CASE("topologies are deterministic and shared across budgets") {
  const auto spec = small_multi();
  const auto a = build_topology(spec, 2, 0.1);
  const auto b = build_topology(spec, 2, 0.1);
  const auto c = build_topology(spec, 2, 0.3);
  const auto d = build_topology(spec, 3, 0.1);
  REQUIRE(a.size() == 3u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.users[i].gain_sd() == b.users[i].gain_sd());
    CHECK(a.users[i].gain_sr() == c.users[i].gain_sr());
    CHECK(a.users[i].gain_rd() == c.users[i].gain_rd());
    CHECK(a.users[i].gain_sd() != d.users[i].gain_sd());
  }
  CHECK(c.relay_budget_w == 0.3);
  auto other_seed = spec;
  other_seed.seed = 8;
  CHECK(build_topology(other_seed, 2, 0.1).users[0].gain_sd() != a.users[0].gain_sd());
}

TEST_CASE("small multi-user run") {
  const auto spec = small_multi();
  const auto rows = run_multi_user(spec);
  REQUIRE(rows.size() == spec.budgets_w.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    CAPTURE(row.coordinate);
    CHECK(row.coordinate == spec.budgets_w[k]);
    const auto& eff = row.mechanism("efficient");
    for (const char* name : {"power", "snr"}) {
      const auto& m = row.mechanism(name);
      CHECK(m.per_user.empty());
      CHECK(m.total >= 0.0);
      CHECK(m.total <= eff.total * (1 + 1e-9) + 1e-12);
      CHECK(m.variance >= 0.0);
    }
  }
  CHECK(run_multi_user(spec, 1) == run_multi_user(spec, 3));

  auto no_oracles = spec;
  no_oracles.oracles = false;
  const auto plain = run_multi_user(no_oracles);
  CHECK(plain[0].mechanisms.size() == 2u);
  CHECK(plain[0].mechanism("power") == rows[0].mechanism("power"));
}
