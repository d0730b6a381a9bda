#pragma once

#include "relay/kernels.hpp"

namespace relay::kernels::detail {

void relayed_snr_scalar(const LinkCoefficients& c, const double* powers,
                        double* out, std::size_t n);
void rate_increase_scalar(const LinkCoefficients& c, double bandwidth_hz,
                          const double* powers, double* out, std::size_t n);
ArgMax pair_sum_argmax_scalar(const double* a, const double* b, std::size_t n);

#if defined(RELAY_HAVE_AVX2)
void relayed_snr_avx2(const LinkCoefficients& c, const double* powers,
                      double* out, std::size_t n);
void rate_increase_avx2(const LinkCoefficients& c, double bandwidth_hz,
                        const double* powers, double* out, std::size_t n);
ArgMax pair_sum_argmax_avx2(const double* a, const double* b, std::size_t n);
#endif

}  // namespace relay::kernels::detail
