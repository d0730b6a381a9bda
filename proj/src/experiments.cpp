#include "relay/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace relay {

namespace {

// Runs fn(0..n-1) on up to `threads` workers; the first exception wins.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> per_hz(const std::vector<double>& rates, double w) {
  std::vector<double> out;
  out.reserve(rates.size());
  for (double r : rates) out.push_back(r / w);
  return out;
}

MechanismResult fill_rates(MechanismResult m, std::vector<double> per_user) {
  m.total = std::accumulate(per_user.begin(), per_user.end(), 0.0);
  m.variance = positive_increase_variance(per_user);
  m.per_user = std::move(per_user);
  return m;
}

}  // namespace

void TwoUserSweepSpec::validate() const {
  system.validate();
  if (!(step > 0.0)) throw ModelError("sweep step must be positive");
  if (!(y_max >= y_min)) throw ModelError("sweep range is empty");
  if (!(source_power_w > 0.0 && relay_budget_w > 0.0 && reserve_bid > 0.0))
    throw ModelError("powers and reserve bid must be positive");
  if (!(target_utilization > 0.0 && target_utilization < 1.0))
    throw ModelError("target utilization must lie in (0, 1)");
  if (!(vcg_delta >= 0.0 && vcg_delta < 1.0))
    throw ModelError("delta must lie in [0, 1)");
}

std::vector<double> TwoUserSweepSpec::relay_positions() const {
  validate();
  std::vector<double> ys;
  const auto count =
      static_cast<long>(std::floor((y_max - y_min) / step + 1e-9));
  for (long k = 0; k <= count; ++k) ys.push_back(y_min + step * k);
  return ys;
}

void MultiUserSpec::validate() const {
  system.validate();
  if (users < 1) throw ModelError("need at least one user");
  if (topologies < 1) throw ModelError("need at least one topology");
  if (!(field_max > field_min)) throw ModelError("field range is empty");
  if (budgets_w.empty()) throw ModelError("no relay budgets given");
  for (double p : budgets_w)
    if (!(p > 0.0)) throw ModelError("relay budgets must be positive");
  if (!(source_power_w > 0.0 && reserve_bid > 0.0))
    throw ModelError("source power and reserve bid must be positive");
  if (!(target_utilization > 0.0 && target_utilization < 1.0))
    throw ModelError("target utilization must lie in (0, 1)");
}

bool MultiUserSpec::oracles_enabled() const {
  return oracles.value_or(users <= 3);
}

const MechanismResult& ReportRow::mechanism(const std::string& name) const {
  for (const auto& m : mechanisms)
    if (m.name == name) return m;
  throw std::out_of_range("report row has no mechanism " + name);
}

NetworkScenario build_two_user_scenario(const TwoUserSweepSpec& spec,
                                        double relay_y) {
  spec.validate();
  const std::vector<LinkGeometry> links{
      {spec.source1, spec.destination1}, {spec.source2, spec.destination2}};
  return make_geometric_scenario(spec.system, spec.relay_budget_w,
                                 Position{spec.relay_x, relay_y}, links,
                                 {spec.source_power_w, spec.source_power_w});
}

NetworkScenario build_topology(const MultiUserSpec& spec, int index,
                               double budget_w) {
  spec.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  const double span = spec.field_max - spec.field_min;
  auto draw = [&] {
    return Position{spec.field_min + span * uniform53(rng),
                    spec.field_min + span * uniform53(rng)};
  };
  std::vector<LinkGeometry> links;
  for (int i = 0; i < spec.users; ++i) {
    LinkGeometry g{draw(), draw()};
    links.push_back(g);
  }
  return make_geometric_scenario(
      spec.system, budget_w, spec.relay, links,
      std::vector<double>(links.size(), spec.source_power_w));
}

MechanismResult run_calibrated_auction(const NetworkScenario& scenario,
                                       AuctionKind kind, double reserve_bid,
                                       double target_utilization) {
  const double w = scenario.system.bandwidth_hz;
  const auto found =
      calibrate_price(scenario, kind, target_utilization, reserve_bid);
  MechanismResult m;
  m.name = std::string(to_string(kind));
  m.price = found.price;
  m.feasible = found.feasible;

  const auto ne = solve_ne(scenario, AuctionParams{kind, found.price, reserve_bid});
  if (!ne) {
    m.feasible = false;
    m.ne_check = false;
    return fill_rates(std::move(m), std::vector<double>(scenario.size(), 0.0));
  }
  m.utilization = ne->utilization;
  m.ne_check = check_no_deviation(scenario, *ne).passed;
  return fill_rates(std::move(m), per_hz(ne->rate_increase, w));
}

MechanismResult summarize_oracle(const std::string& name,
                                 const NetworkScenario& scenario,
                                 const OracleAllocation& allocation) {
  MechanismResult m;
  m.name = name;
  m.utilization = std::accumulate(allocation.powers.begin(),
                                  allocation.powers.end(), 0.0) /
                  scenario.relay_budget_w;
  return fill_rates(std::move(m), per_hz(allocation.rate_increase,
                                         scenario.system.bandwidth_hz));
}

std::vector<ReportRow> run_two_user_sweep(const TwoUserSweepSpec& spec,
                                          unsigned threads) {
  const auto ys = spec.relay_positions();
  std::vector<ReportRow> rows(ys.size());
  parallel_for(ys.size(), threads, [&](std::size_t k) {
    const auto scenario = build_two_user_scenario(spec, ys[k]);
    ReportRow row;
    row.coordinate = ys[k];
    const auto vcg = vcg_auction(scenario, spec.vcg_delta, spec.welfare);
    row.mechanisms.push_back(summarize_oracle("vcg", scenario, vcg.allocation));
    row.mechanisms.push_back(run_calibrated_auction(
        scenario, AuctionKind::Power, spec.reserve_bid, spec.target_utilization));
    row.mechanisms.push_back(run_calibrated_auction(
        scenario, AuctionKind::Snr, spec.reserve_bid, spec.target_utilization));
    rows[k] = std::move(row);
  });
  return rows;
}

std::vector<ReportRow> run_multi_user(const MultiUserSpec& spec,
                                      unsigned threads) {
  spec.validate();
  const std::size_t nb = spec.budgets_w.size();
  const std::size_t nt = static_cast<std::size_t>(spec.topologies);
  const bool oracles = spec.oracles_enabled();

  // cells[b * nt + t] holds every mechanism for budget b, topology t.
  std::vector<std::vector<MechanismResult>> cells(nb * nt);
  parallel_for(nb * nt, threads, [&](std::size_t cell) {
    const std::size_t b = cell / nt;
    const int t = static_cast<int>(cell % nt);
    const auto scenario = build_topology(spec, t, spec.budgets_w[b]);
    auto& out = cells[cell];
    out.push_back(run_calibrated_auction(scenario, AuctionKind::Power,
                                         spec.reserve_bid,
                                         spec.target_utilization));
    out.push_back(run_calibrated_auction(scenario, AuctionKind::Snr,
                                         spec.reserve_bid,
                                         spec.target_utilization));
    if (oracles)
      out.push_back(summarize_oracle(
          "efficient", scenario,
          efficient_allocation(scenario, 0.0, spec.welfare)));
  });

  std::vector<ReportRow> rows;
  for (std::size_t b = 0; b < nb; ++b) {
    ReportRow row;
    row.coordinate = spec.budgets_w[b];
    const std::size_t mechanisms = cells[b * nt].size();
    for (std::size_t m = 0; m < mechanisms; ++m) {
      MechanismResult mean;
      mean.name = cells[b * nt][m].name;
      for (std::size_t t = 0; t < nt; ++t) {
        const auto& c = cells[b * nt + t][m];
        mean.total += c.total;
        mean.utilization += c.utilization;
        mean.price += c.price;
        mean.variance += c.variance;
        mean.feasible = mean.feasible && c.feasible;
        mean.ne_check = mean.ne_check && c.ne_check;
      }
      const double n = static_cast<double>(nt);
      mean.total /= n;
      mean.utilization /= n;
      mean.price /= n;
      mean.variance /= n;
      row.mechanisms.push_back(std::move(mean));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double positive_increase_variance(const std::vector<double>& values) {
  std::vector<double> positive;
  for (double v : values)
    if (v > 0.0) positive.push_back(v);
  if (positive.size() < 2) return 0.0;
  const double n = static_cast<double>(positive.size());
  const double mean = std::accumulate(positive.begin(), positive.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : positive) ss += (v - mean) * (v - mean);
  return ss / n;
}

}  // namespace relay
