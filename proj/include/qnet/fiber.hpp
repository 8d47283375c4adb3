#pragma once

#include "qnet/bell.hpp"
#include "qnet/common.hpp"

namespace qnet::fiber {

struct FiberParams {
  double gamma_per_km = 0.0173;  // attenuation: transmission 10^(-gamma L)
  double c_fiber_m_s = 2e8;      // light speed in fiber
  double tau_emit_s = 175e-6;    // photon emission latency
  double p_detect = 0.21;        // detector efficiency, conversion included
  int multiplex = 1;             // ion pairs per direction per node

  void validate() const;
};

struct ChainResult {
  int n_photon_repeaters = 0;  // 0 means direct link
  int distill_rounds = 0;
  double rate_hz = 0.0;
  double fidelity = 0.0;
  bell::BellDiagonalState state;
  bool feasible = true;  // false when no configuration reaches the goal
};

// Bounds of the configuration search; the objectives are flat beyond
// them at the parameter scales of interest.
inline constexpr int kDefaultMaxRepeaters = 512;
inline constexpr int kMaxDistillRounds = 6;

/// Single-segment transmission 10^(-gamma L / (2 n_p)).
double segment_transmission(double length_km, int n_photon, const FiberParams& params);

/// Expected time for one link whose two fiber segments are d_left and
/// d_right km long: one attempt takes (d_left+d_right)/c + tau, and
/// succeeds with probability P^2 10^(-gamma(d_left+d_right)) / 2.
/// Multiplexing is applied at chain level, not here.
double link_time(double d_left_km, double d_right_km, const FiberParams& params);

/// Waiting amplification (3/2)^log2(n) until all n links are ready.
double waiting_factor(int n_links);

/// Expected end-to-end establishment time with n evenly spaced photon
/// repeaters, divided by the multiplexing count.
double time_with_repeaters(double length_km, int n_photon, const FiberParams& params);

/// Expected time over a bare fiber: (2L/c + tau) / (P 10^(-gamma L)),
/// divided by the multiplexing count.
double time_direct(double length_km, const FiberParams& params);

/// Fastest configuration among the direct link and n_p in [1, max_n];
/// ties go to fewer repeaters. Fidelity is evaluated for `noise`.
ChainResult optimal_repeater_count(double length_km, const FiberParams& params,
                                   const bell::NoiseParams& noise = {},
                                   int max_n = kDefaultMaxRepeaters);

/// End-to-end state of n undistilled ion-ion links joined by n-1 noisy
/// deterministic swaps.
bell::BellDiagonalState chain_fidelity_no_distill(int n_photon, const bell::NoiseParams& noise);

/// Best rate whose end-to-end fidelity reaches `target_fidelity`,
/// searching repeater count and per-link distillation rounds. Expected
/// raw-pair consumption multiplies the per-link time; the parallel
/// waiting factor is kept unchanged. Unreachable targets come back
/// flagged with zero rate.
ChainResult distilled_rate(double length_km, double target_fidelity,
                           const bell::NoiseParams& noise, const FiberParams& params,
                           int max_n = kDefaultMaxRepeaters);

/// Best end-to-end fidelity reachable within `budget_s` seconds. Each
/// link's stored pair dephases for (budget - that link's own expected
/// completion time) at the configured tau_q.
ChainResult fidelity_in_time_budget(double length_km, double budget_s,
                                    const bell::NoiseParams& noise, const FiberParams& params,
                                    int max_n = kDefaultMaxRepeaters);

}  // namespace qnet::fiber
