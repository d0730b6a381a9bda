// AVX2/FMA kernels. This file is built with -mavx2 -mfma and must only be
// entered after the dispatcher has checked the CPU.

#include <immintrin.h>

#include <numbers>

#include "kernels_impl.hpp"

namespace relay::kernels::detail {

namespace {

// Natural log of positive normal doubles: frexp-style range reduction to
// [sqrt(1/2), sqrt(2)) then the Cephes rational approximation of log(1+x).
// Accurate to a few ulp; the scalar path uses std::log1p.
inline __m256d log_pd(__m256d v) {
  const __m256i bits = _mm256_castpd_si256(v);
  const __m256i exp_mask = _mm256_set1_epi64x(0x7ff0000000000000LL);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
  const __m256i half_bits = _mm256_set1_epi64x(0x3fe0000000000000LL);

  // Biased exponent as a double via the 2^52 trick.
  const __m256i biased = _mm256_srli_epi64(_mm256_and_si256(bits, exp_mask), 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(biased, magic)),
      _mm256_set1_pd(4503599627370496.0));
  e = _mm256_sub_pd(e, _mm256_set1_pd(1022.0));

  // Mantissa in [0.5, 1).
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(std::numbers::sqrt2 / 2.0),
                                      _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(small, one));
  const __m256d doubled = _mm256_sub_pd(_mm256_add_pd(m, m), one);
  const __m256d x = _mm256_blendv_pd(_mm256_sub_pd(m, one), doubled, small);

  __m256d p = _mm256_set1_pd(1.01875663804580931796E-4);
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(4.97494994976747001425E-1));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(4.70579119878881725854E0));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(1.44989225341610930846E1));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(1.79368678507819816313E1));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(7.70838733755885391666E0));

  __m256d q = _mm256_add_pd(x, _mm256_set1_pd(1.12873587189167450590E1));
  q = _mm256_fmadd_pd(q, x, _mm256_set1_pd(4.52279145837532221105E1));
  q = _mm256_fmadd_pd(q, x, _mm256_set1_pd(8.29875266912776603211E1));
  q = _mm256_fmadd_pd(q, x, _mm256_set1_pd(7.11544750618563894466E1));
  q = _mm256_fmadd_pd(q, x, _mm256_set1_pd(2.31251620126765340583E1));

  const __m256d z = _mm256_mul_pd(x, x);
  __m256d y = _mm256_mul_pd(x, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(z, _mm256_set1_pd(0.5), y);
  __m256d r = _mm256_add_pd(x, y);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
}

// Keep std:: templates out of this TU: their instantiations would be built
// with AVX2 enabled and may be merged with the baseline copies at link time.
inline double max2(double a, double b) { return a > b ? a : b; }

inline __m256d relayed_snr_pd(__m256d powers, __m256d per_watt,
                              __m256d ceiling, __m256d ceiling_plus_one) {
  const __m256d relay_snr = _mm256_mul_pd(powers, per_watt);
  return _mm256_div_pd(_mm256_mul_pd(relay_snr, ceiling),
                       _mm256_add_pd(relay_snr, ceiling_plus_one));
}

}  // namespace

void relayed_snr_avx2(const LinkCoefficients& c, const double* powers,
                      double* out, std::size_t n) {
  const __m256d per_watt = _mm256_set1_pd(c.relay_snr_per_watt);
  const __m256d ceiling = _mm256_set1_pd(c.ceiling);
  const __m256d ceiling1 = _mm256_set1_pd(c.ceiling + 1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_loadu_pd(powers + i);
    _mm256_storeu_pd(out + i, relayed_snr_pd(p, per_watt, ceiling, ceiling1));
  }
  relayed_snr_scalar(c, powers + i, out + i, n - i);
}

void rate_increase_avx2(const LinkCoefficients& c, double bandwidth_hz,
                        const double* powers, double* out, std::size_t n) {
  const double g = c.direct_snr;
  const __m256d per_watt = _mm256_set1_pd(c.relay_snr_per_watt);
  const __m256d ceiling = _mm256_set1_pd(c.ceiling);
  const __m256d ceiling1 = _mm256_set1_pd(c.ceiling + 1.0);
  const __m256d one_plus_g = _mm256_set1_pd(1.0 + g);
  const __m256d inv_sq = _mm256_set1_pd(1.0 / ((1.0 + g) * (1.0 + g)));
  const __m256d scale = _mm256_set1_pd(0.5 * bandwidth_hz / std::numbers::ln2);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_loadu_pd(powers + i);
    const __m256d x = relayed_snr_pd(p, per_watt, ceiling, ceiling1);
    const __m256d ratio = _mm256_mul_pd(_mm256_add_pd(one_plus_g, x), inv_sq);
    const __m256d gain = _mm256_mul_pd(scale, log_pd(ratio));
    _mm256_storeu_pd(out + i, _mm256_max_pd(gain, zero));
  }
  rate_increase_scalar(c, bandwidth_hz, powers + i, out + i, n - i);
}

ArgMax pair_sum_argmax_avx2(const double* a, const double* b, std::size_t n) {
  // Pass 1: the maximum value. Pass 2: its first index. The sums are the
  // same IEEE additions as the scalar loop, so ties break identically.
  std::size_t i = 0;
  double best = a[0] + b[0];
  if (n >= 4) {
    __m256d vmax = _mm256_add_pd(_mm256_loadu_pd(a), _mm256_loadu_pd(b));
    for (i = 4; i + 4 <= n; i += 4)
      vmax = _mm256_max_pd(
          vmax, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vmax);
    best = max2(max2(lanes[0], lanes[1]), max2(lanes[2], lanes[3]));
  } else {
    i = 1;
  }
  for (; i < n; ++i) best = max2(best, a[i] + b[i]);

  const __m256d target = _mm256_set1_pd(best);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d s = _mm256_add_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(s, target, _CMP_EQ_OQ));
    if (mask != 0) return {j + static_cast<std::size_t>(__builtin_ctz(mask)), best};
  }
  for (; j < n; ++j)
    if (a[j] + b[j] == best) return {j, best};
  return {0, best};
}

}  // namespace relay::kernels::detail
