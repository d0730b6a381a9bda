#include "relay/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace relay::numeric {

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double rel_tol, int max_iter) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi))
    throw RootFindingError("bisect_root: bracket does not straddle a root");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::fabs(hi) || mid == lo || mid == hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double bisect_predicate(const std::function<bool(double)>& pred, double lo,
                        double hi, double rel_tol, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::fabs(hi) || mid == lo || mid == hi) break;
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

Maximum golden_section_max(const std::function<double(double)>& f, double lo,
                           double hi, double rel_tol, int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double f_lo = f(lo);
  const double f_hi = f(hi);

  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter; ++it) {
    if (b - a <= rel_tol * std::max(std::fabs(a), std::fabs(b))) break;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Maximum best = fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
  if (f_lo > best.value) best = {lo, f_lo};
  if (f_hi > best.value) best = {hi, f_hi};
  return best;
}

}  // namespace relay::numeric
