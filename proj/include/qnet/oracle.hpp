#pragma once

#include <cstdint>

#include "qnet/bell.hpp"

namespace qnet::oracle {

struct McConfig {
  std::uint64_t seed = 1;
  std::int64_t trials = 100000;
};

/// Mean number of synchronized attempt rounds until every one of
/// n_segment_pairs independent geometric(p_success) links has succeeded
/// (mean of the per-trial maximum). Deterministic for a fixed seed.
double mc_waiting_rounds(int n_segment_pairs, double p_success, const McConfig& cfg);

/// Same estimate split into `batches` equal sub-batches with derived
/// sub-seeds; used by the variance self-check.
double mc_waiting_rounds_batched(int n_segment_pairs, double p_success, const McConfig& cfg,
                                 int batches, double* batch_means);

struct McDistillYield {
  double mean_raw_pairs;
  double fidelity;  // deterministic output of the recurrence
};

/// Simulates the nested 2->1 purification tree with Bernoulli retries
/// and returns the empirical raw-pair consumption per output pair.
McDistillYield mc_distill_yield(double f, int rounds, const McConfig& cfg);

/// Full 16-dimensional density-matrix computation of the noisy swap:
/// form rho_a (x) rho_b, project the middle qubits onto Psi-, trace
/// them out, apply the depolarizing channel in matrix form, and read
/// the Bell-basis diagonal back off. Entirely independent of the
/// Bell-weight algebra it certifies.
bell::BellDiagonalState dm_swap_oracle(const bell::BellDiagonalState& a,
                                       const bell::BellDiagonalState& b, double f_swap);

}  // namespace qnet::oracle
