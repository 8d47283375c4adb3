#include <cmath>

#include "doctest.h"
#include "qnet/fiber.hpp"
#include "qnet/oracle.hpp"

using namespace qnet;

namespace {
const fiber::FiberParams kPaperFiber;  // gamma 0.0173, c 2e8, tau 175us, P 0.21
}

TEST_CASE("segment transmission") {
  CHECK(fiber::segment_transmission(61.7, 1, kPaperFiber) ==
        doctest::Approx(std::pow(10.0, -0.0173 * 30.85)).epsilon(1e-12));
  CHECK(fiber::segment_transmission(61.7, 1, kPaperFiber) == doctest::Approx(0.2926).epsilon(1e-3));
  CHECK(fiber::segment_transmission(0.0, 3, kPaperFiber) == 1.0);
  CHECK(fiber::segment_transmission(100.0, 10, kPaperFiber) ==
        doctest::Approx(0.8194).epsilon(1e-3));
  CHECK_THROWS_AS(fiber::segment_transmission(10.0, 0, kPaperFiber), UsageError);
}

TEST_CASE("direct-link time") {
  // (2L/c + tau) / (P 10^(-gamma L)) at L = 61.7 km.
  const double t = fiber::time_direct(61.7, kPaperFiber);
  CHECK(t == doctest::Approx(0.0440).epsilon(0.01));
  CHECK(1.0 / t == doctest::Approx(22.7).epsilon(0.01));

  // Attenuation-free limit: tau / P.
  const double near_zero = fiber::time_direct(1e-9, kPaperFiber);
  CHECK(near_zero == doctest::Approx(175e-6 / 0.21).epsilon(1e-6));

  // Exponential collapse without repeaters.
  const double repeatered = fiber::optimal_repeater_count(200.0, kPaperFiber).rate_hz;
  CHECK(1.0 / fiber::time_direct(200.0, kPaperFiber) < 1e-1 * repeatered);
}

TEST_CASE("repeatered time reduces to the closed form at n=1") {
  const double L = 80.0;
  const double eta = fiber::segment_transmission(L, 1, kPaperFiber);
  const double expected = 2.0 * (L * 1000.0 / 2e8 + 175e-6) / (0.21 * 0.21 * eta * eta);
  CHECK(fiber::time_with_repeaters(L, 1, kPaperFiber) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("multiplexing rescales rates linearly and leaves fidelity alone") {
  fiber::FiberParams doubled = kPaperFiber;
  doubled.multiplex = 2;
  for (int n : {1, 4, 9}) {
    CHECK(fiber::time_with_repeaters(120.0, n, doubled) * 2.0 ==
          fiber::time_with_repeaters(120.0, n, kPaperFiber));
  }
  CHECK(fiber::time_direct(45.0, doubled) * 2.0 == fiber::time_direct(45.0, kPaperFiber));

  const auto base = fiber::distilled_rate(150.0, 0.9, {}, kPaperFiber);
  const auto faster = fiber::distilled_rate(150.0, 0.9, {}, doubled);
  CHECK(faster.rate_hz == doctest::Approx(2.0 * base.rate_hz).epsilon(1e-12));
  CHECK(faster.fidelity == base.fidelity);
}

TEST_CASE("optimal repeater count per length regime") {
  CHECK(fiber::optimal_repeater_count(50.0, kPaperFiber).n_photon_repeaters == 0);

  const auto just_past = fiber::optimal_repeater_count(62.0, kPaperFiber);
  CHECK(just_past.n_photon_repeaters >= 6);
  CHECK(just_past.n_photon_repeaters <= 8);

  // Optimum grows (weakly) with distance.
  int prev = 0;
  for (double L : {100.0, 200.0, 400.0, 700.0, 1000.0}) {
    const int n = fiber::optimal_repeater_count(L, kPaperFiber).n_photon_repeaters;
    CHECK(n >= prev);
    prev = n;
  }

  // Exhaustive optimality on a grid.
  for (double L : {40.0, 61.7, 90.0, 250.0}) {
    const auto best = fiber::optimal_repeater_count(L, kPaperFiber, {}, 64);
    CHECK(best.rate_hz >= 1.0 / fiber::time_direct(L, kPaperFiber) - 1e-12);
    for (int n = 1; n <= 64; ++n)
      CHECK(best.rate_hz >= 1.0 / fiber::time_with_repeaters(L, n, kPaperFiber) - 1e-12);
  }
}

TEST_CASE("undistilled chain fidelity") {
  const bell::NoiseParams noise;
  CHECK(fiber::chain_fidelity_no_distill(1, noise).fidelity() ==
        doctest::Approx(0.970596).epsilon(1e-9));
  CHECK(fiber::chain_fidelity_no_distill(27, noise).fidelity() < 0.5);

  bell::NoiseParams perfect;
  perfect.f0 = perfect.f_swap_photon = perfect.f_swap_ion = 1.0;
  CHECK(fiber::chain_fidelity_no_distill(2, perfect).fidelity() == doctest::Approx(1.0));

  // Strictly decreasing under imperfect hardware.
  double prev = 1.0;
  for (int n = 1; n <= 30; ++n) {
    const double f = fiber::chain_fidelity_no_distill(n, noise).fidelity();
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("distilled rate behavior") {
  const bell::NoiseParams noise;

  // Short haul: the bare link already beats the target, no distillation.
  const auto direct = fiber::distilled_rate(40.0, 0.87, noise, kPaperFiber);
  CHECK(direct.feasible);
  CHECK(direct.n_photon_repeaters == 0);
  CHECK(direct.distill_rounds == 0);
  CHECK(direct.rate_hz == doctest::Approx(1.0 / fiber::time_direct(40.0, kPaperFiber)));

  // Unreachable target past the recurrence plateau comes back flagged.
  const auto hopeless = fiber::distilled_rate(100.0, 0.9999, noise, kPaperFiber);
  CHECK_FALSE(hopeless.feasible);
  CHECK(hopeless.rate_hz == 0.0);

  // Long haul needs repeaters and meets the target.
  const auto far = fiber::distilled_rate(400.0, 0.87, noise, kPaperFiber);
  CHECK(far.feasible);
  CHECK(far.n_photon_repeaters > 0);
  CHECK(far.fidelity >= 0.87);
}

TEST_CASE("fidelity within a time budget") {
  const bell::NoiseParams noise;

  // A huge budget is limited only by the distillation plateau.
  const auto unconstrained = fiber::fidelity_in_time_budget(50.0, 1e9, noise, kPaperFiber);
  CHECK(unconstrained.feasible);
  const double plateau = bell::nested_distill(noise.f0, fiber::kMaxDistillRounds).fidelity;
  CHECK(unconstrained.fidelity == doctest::Approx(plateau).epsilon(1e-9));

  // An impossible budget is flagged.
  const auto squeezed = fiber::fidelity_in_time_budget(800.0, 1e-9, noise, kPaperFiber);
  CHECK_FALSE(squeezed.feasible);
  CHECK(squeezed.fidelity == 0.0);

  // Long haul within a satellite-scale budget loses entanglement: the
  // budget forces a repeater cascade whose swap noise erases the state.
  fiber::FiberParams multiplexed = kPaperFiber;
  multiplexed.multiplex = 10;
  const auto mid = fiber::fidelity_in_time_budget(1300.0, 1.0 / 3.2, noise, multiplexed);
  const auto far = fiber::fidelity_in_time_budget(2000.0, 1.0 / 3.2, noise, multiplexed);
  CHECK(mid.fidelity < 0.65);
  CHECK(far.fidelity < 0.5);

  // Finite but long memory barely moves the answer at paper scales.
  bell::NoiseParams finite = noise;
  finite.tau_q = 5.0;
  const auto infinite_mem = fiber::fidelity_in_time_budget(300.0, 1.0 / 3.2, noise, multiplexed);
  const auto finite_mem = fiber::fidelity_in_time_budget(300.0, 1.0 / 3.2, finite, multiplexed);
  CHECK(infinite_mem.feasible);
  CHECK(finite_mem.feasible);
  CHECK(std::abs(infinite_mem.fidelity - finite_mem.fidelity) < 0.03);
  CHECK(finite_mem.fidelity <= infinite_mem.fidelity);
}

TEST_CASE("repeatered timing against the Monte Carlo waiting oracle") {
  // The closed-form prefactor is a known conservative overestimate of
  // the simulated mean-of-max waiting; at n=16 it overshoots by about a
  // third and never undershoots.
  const double L = 500.0;
  const int n = 16;
  const double d = L / (2.0 * n);
  const double eta2 = std::pow(10.0, -2.0 * kPaperFiber.gamma_per_km * d);
  const double p_link = 0.5 * kPaperFiber.p_detect * kPaperFiber.p_detect * eta2;
  const double attempt = L * 1000.0 / (n * 2e8) + kPaperFiber.tau_emit_s;

  const oracle::McConfig cfg{31, 100000};
  const double mc_time = oracle::mc_waiting_rounds(n, p_link, cfg) * attempt;
  const double analytic = fiber::time_with_repeaters(L, n, kPaperFiber);
  CHECK(analytic > mc_time);
  CHECK(analytic / mc_time == doctest::Approx(1.5).epsilon(0.15));
}
