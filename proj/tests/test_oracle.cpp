#include <cmath>

#include "doctest.h"
#include "qnet/oracle.hpp"

using namespace qnet;

TEST_CASE("waiting rounds for a single link match the geometric mean") {
  const oracle::McConfig cfg{123, 200000};
  CHECK(oracle::mc_waiting_rounds(1, 0.5, cfg) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(oracle::mc_waiting_rounds(1, 0.1, cfg) == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("waiting rounds for two links match the exact max expectation") {
  const oracle::McConfig cfg{9, 200000};
  // E[max] = 1/p + 1/p - 1/(2p - p^2)
  const double exact = 1.0 / 0.5 + 1.0 / 0.5 - 1.0 / (2.0 * 0.5 - 0.5 * 0.5);
  CHECK(exact == doctest::Approx(8.0 / 3.0));
  CHECK(oracle::mc_waiting_rounds(2, 0.5, cfg) == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("waiting rounds are deterministic per seed and disperse across batches") {
  const oracle::McConfig cfg{77, 50000};
  const double a = oracle::mc_waiting_rounds(4, 0.2, cfg);
  const double b = oracle::mc_waiting_rounds(4, 0.2, cfg);
  CHECK(a == b);

  double means[10];
  oracle::mc_waiting_rounds_batched(4, 0.2, cfg, 10, means);
  double lo = means[0], hi = means[0];
  for (double m : means) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  CHECK(hi > lo);  // independent sub-seeds really vary

  // Quadrupling the trials roughly halves the batch-mean spread.
  oracle::McConfig big = cfg;
  big.trials = cfg.trials * 16;
  double means_big[10];
  oracle::mc_waiting_rounds_batched(4, 0.2, big, 10, means_big);
  double var_small = 0.0, var_big = 0.0, m_small = 0.0, m_big = 0.0;
  for (double m : means) m_small += m / 10.0;
  for (double m : means_big) m_big += m / 10.0;
  for (double m : means) var_small += (m - m_small) * (m - m_small) / 9.0;
  for (double m : means_big) var_big += (m - m_big) * (m - m_big) / 9.0;
  CHECK(var_big < var_small);  // 16x trials => ~4x smaller sd, well below

  CHECK_THROWS_AS(oracle::mc_waiting_rounds(0, 0.5, cfg), ParamError);
  CHECK_THROWS_AS(oracle::mc_waiting_rounds(1, 0.0, cfg), ParamError);
}

TEST_CASE("the analytic waiting factor is an overestimate that grows with n") {
  // The (3/2)^log2(n) prefactor models the mean of the per-link maxima;
  // the exact expectation sits below it, increasingly so at larger n.
  const oracle::McConfig cfg{5, 100000};
  for (double p : {0.1, 0.5}) {
    double prev_ratio = 1.0;
    for (int n : {2, 4, 8, 16}) {
      const double analytic = std::pow(1.5, std::log2(static_cast<double>(n))) / p;
      const double mc = oracle::mc_waiting_rounds(n, p, cfg);
      const double ratio = analytic / mc;
      CHECK(ratio >= prev_ratio - 0.02);  // deviation widens with n
      CHECK(ratio >= 1.0);                // always conservative
      CHECK(ratio < 2.0);                 // never off by 2x in this regime
      prev_ratio = ratio;
    }
  }
}

TEST_CASE("distillation yield simulation matches the closed form") {
  const oracle::McConfig cfg{2024, 100000};

  const auto none = oracle::mc_distill_yield(0.8, 0, cfg);
  CHECK(none.mean_raw_pairs == 1.0);
  CHECK(none.fidelity == 0.8);

  const auto once = oracle::mc_distill_yield(0.8, 1, cfg);
  CHECK(once.mean_raw_pairs == doctest::Approx(2.601156).epsilon(0.02));
  CHECK(once.fidelity == doctest::Approx(0.838150).epsilon(1e-5));

  const auto tripled = oracle::mc_distill_yield(0.9, 3, cfg);
  const bell::DistillPlan plan = bell::nested_distill(0.9, 3);
  CHECK(tripled.mean_raw_pairs == doctest::Approx(plan.expected_raw_pairs).epsilon(0.02));
  CHECK(tripled.fidelity == plan.fidelity);
}

TEST_CASE("density-matrix oracle on hand-checkable inputs") {
  using bell::BellDiagonalState;
  const BellDiagonalState pure = BellDiagonalState::pure_psi_minus();

  const BellDiagonalState ideal = oracle::dm_swap_oracle(pure, pure, 1.0);
  CHECK(ideal.fidelity() == doctest::Approx(1.0).epsilon(1e-12));

  // Psi+ and Psi- swap into each other's class through a Psi- outcome.
  const BellDiagonalState psip = BellDiagonalState::psi_mixture(0.0);
  const BellDiagonalState crossed = oracle::dm_swap_oracle(psip, pure, 1.0);
  CHECK(crossed.psi_plus() == doctest::Approx(1.0).epsilon(1e-12));

  // Weights from a mixed pair remain a distribution.
  const BellDiagonalState mixed = oracle::dm_swap_oracle(
      BellDiagonalState::psi_mixture(0.7), BellDiagonalState::psi_mixture(0.9), 0.25);
  double sum = 0.0;
  for (double w : mixed.w) {
    CHECK(w >= -1e-12);
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}
