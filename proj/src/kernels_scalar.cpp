#include <cmath>
#include <numbers>

#include "kernels_impl.hpp"

namespace relay::kernels::detail {

void relayed_snr_scalar(const LinkCoefficients& c, const double* powers,
                        double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double relay_snr = powers[i] * c.relay_snr_per_watt;
    out[i] = relay_snr * c.ceiling / (relay_snr + c.ceiling + 1.0);
  }
}

void rate_increase_scalar(const LinkCoefficients& c, double bandwidth_hz,
                          const double* powers, double* out, std::size_t n) {
  const double g = c.direct_snr;
  const double breakeven = g * g + g;
  const double denom = (1.0 + g) * (1.0 + g);
  const double scale = 0.5 * bandwidth_hz / std::numbers::ln2;
  for (std::size_t i = 0; i < n; ++i) {
    const double relay_snr = powers[i] * c.relay_snr_per_watt;
    const double x = relay_snr * c.ceiling / (relay_snr + c.ceiling + 1.0);
    const double excess = (x - breakeven) / denom;
    out[i] = excess > 0.0 ? scale * std::log1p(excess) : 0.0;
  }
}

ArgMax pair_sum_argmax_scalar(const double* a, const double* b,
                              std::size_t n) {
  ArgMax best{0, a[0] + b[0]};
  for (std::size_t i = 1; i < n; ++i) {
    const double v = a[i] + b[i];
    if (v > best.value) best = {i, v};
  }
  return best;
}

}  // namespace relay::kernels::detail
