#pragma once

#include <functional>
#include <stdexcept>

namespace relay::numeric {

class RootFindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bisection for a sign change of `f` on [lo, hi]. Requires f(lo) and f(hi)
/// to have opposite signs (zero counts as either). Stops when the bracket is
/// narrower than rel_tol * |hi|.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double rel_tol = 1e-12, int max_iter = 400);

/// Bisection on a monotone predicate: `pred(lo)` is false and `pred(hi)` is
/// true. Returns the smallest point found where pred holds.
double bisect_predicate(const std::function<bool(double)>& pred, double lo,
                        double hi, double rel_tol = 1e-12, int max_iter = 400);

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
/// Endpoints are compared against the interior optimum so monotone objectives
/// return the better endpoint.
Maximum golden_section_max(const std::function<double(double)>& f, double lo,
                           double hi, double rel_tol = 1e-10,
                           int max_iter = 300);

}  // namespace relay::numeric
