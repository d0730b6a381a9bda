#include "relay/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "relay/kernels.hpp"
#include "relay/numeric.hpp"

namespace relay {

double EquilibriumResult::total_rate_increase() const {
  return std::accumulate(rate_increase.begin(), rate_increase.end(), 0.0);
}

std::vector<BestResponseValue> response_factors(
    const NetworkScenario& scenario, const AuctionParams& params) {
  params.validate();
  const double budget = scenario.relay_budget_w;
  std::vector<BestResponseValue> out;
  out.reserve(scenario.size());
  for (const auto& u : scenario.users) {
    if (params.kind == AuctionKind::Snr)
      out.push_back(
          snr_best_response_factor(u, params.price, budget, scenario.system));
    else
      out.push_back(
          power_best_response_factor(u, params.price, budget, scenario.system));
  }
  return out;
}

namespace {

IterationTrace iterate_with_factors(const std::vector<BestResponseValue>& f,
                                    double beta, const BidProfile& start,
                                    const IterationOptions& options) {
  IterationTrace trace;
  std::vector<double> bids = start.bids();
  if (options.keep_profiles) trace.profiles.push_back(bids);
  for (const auto& v : f) {
    if (v.is_infinite()) {
      trace.diverged = true;
      trace.final_bids = bids;
      return trace;
    }
  }

  std::vector<double> next(bids.size());
  for (int t = 0; t < options.max_iter; ++t) {
    const double total = std::accumulate(bids.begin(), bids.end(), 0.0);
    double residual = 0.0;
    double largest = 0.0;
    for (std::size_t i = 0; i < bids.size(); ++i) {
      next[i] = f[i].value() * (total - bids[i] + beta);
      residual = std::max(residual, std::fabs(next[i] - bids[i]));
      largest = std::max(largest, next[i]);
    }
    bids.swap(next);
    trace.residuals.push_back(residual);
    if (options.keep_profiles) trace.profiles.push_back(bids);
    if (!(largest <= options.divergence_cap * beta)) {
      trace.diverged = true;
      break;
    }
    if (residual <= options.tol * std::max(largest, beta)) {
      trace.converged = true;
      break;
    }
  }
  trace.final_bids = bids;
  return trace;
}

void require_positive_start(const BidProfile& start, std::size_t users) {
  if (start.size() != users)
    throw ModelError("starting profile must have one bid per user");
  for (double b : start.bids())
    if (!(b > 0.0)) throw ModelError("starting bids must be positive");
}

// Natural price unit: W/(2 ln2) per unit SNR, or per budget watt.
double price_scale(const NetworkScenario& scenario, AuctionKind kind) {
  const double unit = scenario.system.bandwidth_hz / (2.0 * std::numbers::ln2);
  return kind == AuctionKind::Snr ? unit : unit / scenario.relay_budget_w;
}

}  // namespace

IterationTrace iterate_best_response(const NetworkScenario& scenario,
                                     const AuctionParams& params,
                                     const BidProfile& start,
                                     const IterationOptions& options) {
  require_positive_start(start, scenario.size());
  if (!(options.tol > 0.0)) throw ModelError("tolerance must be positive");
  return iterate_with_factors(response_factors(scenario, params),
                              params.reserve_bid, start, options);
}

EquilibriumResult evaluate_profile(const NetworkScenario& scenario,
                                   const AuctionParams& params,
                                   const BidProfile& bids) {
  EquilibriumResult r;
  r.params = params;
  r.bids = bids;
  r.allocation = allocate(bids, params.reserve_bid, scenario.relay_budget_w);
  const auto& sys = scenario.system;
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    const auto& u = scenario.users[i];
    const double p = r.allocation.powers[i];
    r.rate_increase.push_back(rate_increase(u, p, sys));
    r.delta_snr.push_back(relayed_snr(u, p, sys));
    r.payments.push_back(payment(params.kind, params.price, u, p, sys));
    r.payoffs.push_back(r.rate_increase.back() - r.payments.back());
  }
  r.utilization = r.allocation.total() / scenario.relay_budget_w;
  return r;
}

std::optional<double> equilibrium_utilization(
    const std::vector<BestResponseValue>& factors) {
  double share = 0.0;
  for (const auto& f : factors) {
    if (f.is_infinite()) return std::nullopt;
    share += f.value() / (1.0 + f.value());
  }
  if (!(share < 1.0)) return std::nullopt;
  return share;
}

std::optional<EquilibriumResult> solve_ne(const NetworkScenario& scenario,
                                          const AuctionParams& params) {
  scenario.validate();
  const auto factors = response_factors(scenario, params);
  const double beta = params.reserve_bid;
  const std::size_t n = scenario.size();

  if (params.kind == AuctionKind::Snr) {
    const auto share = equilibrium_utilization(factors);
    if (!share) return std::nullopt;
    // Total bid B solves B = S (B + beta); each b_i = f_i/(1+f_i) (B + beta).
    const double total = beta * *share / (1.0 - *share);
    std::vector<double> bids(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = factors[i].value();
      bids[i] = f / (1.0 + f) * (total + beta);
    }
    auto result = evaluate_profile(scenario, params, BidProfile(bids));
    if (*share > 0.0) {
      IterationOptions opts;
      opts.tol = 1e-12;
      opts.keep_profiles = false;
      const auto trace = iterate_with_factors(
          factors, beta, BidProfile::uniform(n, beta), opts);
      result.iterations = trace.iterations();
      if (trace.converged && trace.iterations() >= 5)
        result.geometric_rate = estimate_geometric_rate(trace);
    }
    return result;
  }

  // Power auction: best-response iteration from several fixed starts.
  std::mt19937_64 rng(20080501);
  std::uniform_real_distribution<double> log_scale(-2.0, 2.0);
  IterationOptions opts;
  opts.tol = 1e-12;
  opts.keep_profiles = false;
  std::optional<IterationTrace> first;
  constexpr int kStarts = 5;
  for (int s = 0; s < kStarts; ++s) {
    std::vector<double> start(n);
    for (auto& b : start) b = beta * std::pow(10.0, log_scale(rng));
    auto trace = iterate_with_factors(factors, beta, BidProfile(start), opts);
    if (!trace.converged) return std::nullopt;
    if (!first) {
      first = std::move(trace);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = std::max(first->final_bids[i], beta);
      if (std::fabs(trace.final_bids[i] - first->final_bids[i]) > 1e-6 * scale)
        throw std::runtime_error("solve_ne: multistart fixed points disagree");
    }
  }
  auto result = evaluate_profile(scenario, params, BidProfile(first->final_bids));
  result.iterations = first->iterations();
  if (result.utilization > 0.0 && first->iterations() >= 5)
    result.geometric_rate = estimate_geometric_rate(*first);
  return result;
}

double threshold_price(const NetworkScenario& scenario, AuctionKind kind,
                       double rel_tol) {
  scenario.validate();
  if (!is_regular(scenario, kind))
    throw ModelError("threshold price requires a regular scenario");
  auto exists = [&](double price) {
    return equilibrium_utilization(
               response_factors(scenario, AuctionParams{kind, price, 1.0}))
        .has_value();
  };
  double hi = price_scale(scenario, kind);
  for (int i = 0; !exists(hi); ++i) {
    if (i > 400) throw ModelError("threshold price: no equilibrium found");
    hi *= 2.0;
  }
  double lo = hi;
  for (int i = 0; exists(lo); ++i) {
    if (i > 400) throw ModelError("threshold price: equilibria at every price");
    lo *= 0.5;
  }
  return numeric::bisect_predicate(exists, lo, hi, rel_tol);
}

PriceSearchResult calibrate_price(const NetworkScenario& scenario,
                                  AuctionKind kind, double target,
                                  double reserve_bid) {
  scenario.validate();
  if (!(target > 0.0 && target < 1.0))
    throw ModelError("target utilization must lie in (0, 1)");
  auto utilization = [&](double price) {
    return equilibrium_utilization(
        response_factors(scenario, AuctionParams{kind, price, reserve_bid}));
  };
  auto meets = [&](double price) {
    const auto u = utilization(price);
    return u && *u >= target;
  };

  // High enough that the NE exists and misses the target (all-zero at worst).
  double hi = price_scale(scenario, kind);
  for (int i = 0;; ++i) {
    const auto u = utilization(hi);
    if (u && *u < target) break;
    if (i > 400) throw ModelError("calibrate_price: no high-price equilibrium");
    hi *= 2.0;
  }
  // Walk down until the NE disappears or reaches the target.
  double lo = hi;
  std::optional<double> u_lo;
  constexpr int kMaxHalvings = 200;
  for (int i = 0; i < kMaxHalvings; ++i) {
    lo *= 0.5;
    u_lo = utilization(lo);
    if (!u_lo || *u_lo >= target) break;
  }
  if (u_lo && *u_lo < target) {
    // Nothing allocated at any price: report the price the walk started at.
    if (*u_lo == 0.0) return {hi, 0.0, false};
    return {lo, *u_lo, false};
  }

  double good = lo;
  if (!u_lo) {
    // Existence boundary first; utilization is largest just above it.
    auto exists = [&](double price) { return utilization(price).has_value(); };
    good = numeric::bisect_predicate(exists, lo, hi, 1e-13);
    const auto u = utilization(good);
    if (!u) throw ModelError("calibrate_price: existence boundary not found");
    if (*u < target) return {good, *u, false};
  }
  // meets(good) holds and meets(hi) does not; keep the good side.
  double bad = hi;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (good + bad);
    if (bad - good <= 1e-13 * bad || mid == good || mid == bad) break;
    if (meets(mid))
      good = mid;
    else
      bad = mid;
  }
  return {good, *utilization(good), true};
}

double estimate_geometric_rate(const IterationTrace& trace) {
  std::vector<double> logs;
  for (double r : trace.residuals)
    if (r > 0.0) logs.push_back(std::log(r));
  // Drop the last step (it may sit at the rounding floor) and the first
  // quarter (transient).
  if (logs.size() < 5)
    throw std::invalid_argument("geometric rate needs at least 5 residuals");
  const std::size_t end = logs.size() - 1;
  const std::size_t begin = std::min(end - 3, logs.size() / 4);
  const double n = static_cast<double>(end - begin);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t t = begin; t < end; ++t) {
    const double x = static_cast<double>(t);
    sx += x;
    sy += logs[t];
    sxx += x * x;
    sxy += x * logs[t];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(slope);
}

DeviationCheck check_no_deviation(const NetworkScenario& scenario,
                                  const EquilibriumResult& ne, int points,
                                  double rel_tol) {
  if (points < 2) throw std::invalid_argument("need at least two scan points");
  const auto& sys = scenario.system;
  const double beta = ne.params.reserve_bid;
  const double budget = scenario.relay_budget_w;
  const double total = ne.bids.total();

  DeviationCheck check;
  std::vector<double> powers(points), gains(points), snr(points);
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    const auto& u = scenario.users[i];
    const double own = ne.bids[i];
    const double others = total - own;
    const double at_ne = payoff(u, own, others, ne.params, budget, sys);
    const double upper = 10.0 * own + beta;
    for (int k = 0; k < points; ++k) {
      const double b = upper * k / (points - 1);
      powers[k] = b / (b + others + beta) * budget;
    }
    kernels::rate_increase_batch(u, sys, powers, gains);
    if (ne.params.kind == AuctionKind::Snr)
      kernels::relayed_snr_batch(u, powers, snr);
    for (int k = 0; k < points; ++k) {
      const double paid = ne.params.kind == AuctionKind::Snr
                              ? ne.params.price * snr[k]
                              : ne.params.price * powers[k];
      const double gain = gains[k] - paid - at_ne;
      if (gain > check.worst_gain) {
        check.worst_gain = gain;
        check.worst_user = i;
      }
      if (gain > rel_tol * std::max(std::fabs(at_ne), 1.0)) check.passed = false;
    }
  }
  return check;
}

}  // namespace relay
