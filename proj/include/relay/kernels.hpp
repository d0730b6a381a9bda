#pragma once

// Batch kernels for the data-parallel inner loops: relay-power grids in the
// centralized oracles and payoff scans in the equilibrium checks.
//
// Every kernel has a scalar reference version. SIMD variants are compiled
// into separate translation units and picked once at startup according to
// what the running CPU supports. Set RELAY_KERNELS=scalar in the environment
// to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

#include "relay/channel.hpp"

namespace relay::kernels {

/// Per-link constants the kernels need, in SNR units.
struct LinkCoefficients {
  double relay_snr_per_watt = 0.0;  // G_rd / sigma^2
  double ceiling = 0.0;             // P_s G_sr / sigma^2
  double direct_snr = 0.0;          // Gamma_sd
};

LinkCoefficients coefficients(const UserLink& link);

struct ArgMax {
  std::size_t index = 0;
  double value = 0.0;
};

struct KernelTable {
  std::string_view name;
  void (*relayed_snr)(const LinkCoefficients& c, const double* powers,
                      double* out, std::size_t n);
  /// Rate increase in bits/s for each relay power.
  void (*rate_increase)(const LinkCoefficients& c, double bandwidth_hz,
                        const double* powers, double* out, std::size_t n);
  /// First index maximizing a[i] + b[i]; n must be > 0.
  ArgMax (*pair_sum_argmax)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant is not built or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();
/// The table selected for this process.
const KernelTable& active_kernels();

void relayed_snr_batch(const UserLink& link, std::span<const double> powers,
                       std::span<double> out);
void rate_increase_batch(const UserLink& link, const SystemParams& sys,
                         std::span<const double> powers, std::span<double> out);
ArgMax pair_sum_argmax(std::span<const double> a, std::span<const double> b);

}  // namespace relay::kernels
