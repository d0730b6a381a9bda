#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "kernels_impl.hpp"

namespace relay::kernels {

namespace {

const KernelTable kScalar{"scalar", detail::relayed_snr_scalar,
                          detail::rate_increase_scalar,
                          detail::pair_sum_argmax_scalar};

#if defined(RELAY_HAVE_AVX2)
const KernelTable kAvx2{"avx2", detail::relayed_snr_avx2,
                        detail::rate_increase_avx2,
                        detail::pair_sum_argmax_avx2};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& select() {
  if (const char* forced = std::getenv("RELAY_KERNELS")) {
    if (std::string_view(forced) == "scalar") return kScalar;
  }
  if (const KernelTable* simd = avx2_kernels()) return *simd;
  return kScalar;
}

}  // namespace

LinkCoefficients coefficients(const UserLink& link) {
  return {link.relay_snr_per_watt(), link.relayed_snr_ceiling(),
          link.direct_snr()};
}

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* avx2_kernels() {
#if defined(RELAY_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

void relayed_snr_batch(const UserLink& link, std::span<const double> powers,
                       std::span<double> out) {
  if (out.size() < powers.size())
    throw std::invalid_argument("relayed_snr_batch: output too small");
  active_kernels().relayed_snr(coefficients(link), powers.data(), out.data(),
                               powers.size());
}

void rate_increase_batch(const UserLink& link, const SystemParams& sys,
                         std::span<const double> powers,
                         std::span<double> out) {
  if (out.size() < powers.size())
    throw std::invalid_argument("rate_increase_batch: output too small");
  active_kernels().rate_increase(coefficients(link), sys.bandwidth_hz,
                                 powers.data(), out.data(), powers.size());
}

ArgMax pair_sum_argmax(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || a.size() != b.size())
    throw std::invalid_argument("pair_sum_argmax: sizes must match and be > 0");
  return active_kernels().pair_sum_argmax(a.data(), b.data(), a.size());
}

}  // namespace relay::kernels
