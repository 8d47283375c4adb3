#include "qnet/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qnet::fiber {

void FiberParams::validate() const {
  if (!(gamma_per_km > 0.0)) throw ParamError("gamma_per_km must be positive");
  if (!(c_fiber_m_s > 0.0)) throw ParamError("c_fiber_m_s must be positive");
  if (!(tau_emit_s >= 0.0)) throw ParamError("tau_emit_s must be nonnegative");
  if (!(p_detect > 0.0 && p_detect <= 1.0)) throw ParamError("p_detect must be in (0, 1]");
  if (multiplex < 1) throw ParamError("multiplex must be >= 1");
}

double segment_transmission(double length_km, int n_photon, const FiberParams& params) {
  params.validate();
  if (length_km < 0.0) throw ParamError("length_km must be nonnegative");
  if (n_photon < 1)
    throw UsageError("segment_transmission needs n_photon >= 1; use time_direct for bare fiber");
  return std::pow(10.0, -params.gamma_per_km * length_km / (2.0 * n_photon));
}

double link_time(double d_left_km, double d_right_km, const FiberParams& params) {
  const double span_km = d_left_km + d_right_km;
  const double attempt_s = span_km * 1000.0 / params.c_fiber_m_s + params.tau_emit_s;
  const double p_link =
      0.5 * params.p_detect * params.p_detect * std::pow(10.0, -params.gamma_per_km * span_km);
  return attempt_s / p_link;
}

double waiting_factor(int n_links) {
  if (n_links < 1) throw ParamError("waiting_factor needs at least one link");
  return std::pow(1.5, std::log2(static_cast<double>(n_links)));
}

double time_with_repeaters(double length_km, int n_photon, const FiberParams& params) {
  params.validate();
  if (!(length_km > 0.0)) throw ParamError("length_km must be positive");
  if (n_photon < 1) throw ParamError("n_photon must be >= 1");
  const double d = length_km / (2.0 * n_photon);
  return link_time(d, d, params) * waiting_factor(n_photon) / params.multiplex;
}

double time_direct(double length_km, const FiberParams& params) {
  params.validate();
  if (length_km < 0.0) throw ParamError("length_km must be nonnegative");
  const double attempt_s = 2.0 * length_km * 1000.0 / params.c_fiber_m_s + params.tau_emit_s;
  const double p = params.p_detect * std::pow(10.0, -params.gamma_per_km * length_km);
  return attempt_s / p / params.multiplex;
}

ChainResult optimal_repeater_count(double length_km, const FiberParams& params,
                                   const bell::NoiseParams& noise, int max_n) {
  params.validate();
  noise.validate();
  if (!(length_km > 0.0)) throw ParamError("length_km must be positive");
  if (max_n < 1) throw ParamError("max_n must be >= 1");

  int best_n = 0;
  double best_time = time_direct(length_km, params);
  for (int n = 1; n <= max_n; ++n) {
    const double t = time_with_repeaters(length_km, n, params);
    if (t < best_time) {
      best_time = t;
      best_n = n;
    }
  }

  ChainResult out;
  out.n_photon_repeaters = best_n;
  out.rate_hz = 1.0 / best_time;
  out.state = best_n == 0 ? bell::BellDiagonalState::psi_mixture(noise.f0)
                          : chain_fidelity_no_distill(best_n, noise);
  out.fidelity = out.state.fidelity();
  return out;
}

bell::BellDiagonalState chain_fidelity_no_distill(int n_photon, const bell::NoiseParams& noise) {
  if (n_photon < 1) throw ParamError("n_photon must be >= 1");
  const bell::BellDiagonalState link = bell::ion_ion_after_photon_bsm(noise);
  bell::BellDiagonalState acc = link;
  for (int i = 1; i < n_photon; ++i) acc = bell::swap_dbsm(acc, link, noise.f_swap_ion);
  return acc;
}

namespace {

struct Candidate {
  int n = 0;  // photon repeaters; 0 = direct
  int rounds = 0;
  double time_s = 0.0;
  bell::BellDiagonalState raw_link;  // per-link state after distillation
};

// Expected establishment time of one configuration: per-link time times
// expected raw pairs, amplified by the waiting factor, divided by the
// multiplexing count.
double config_time(double length_km, int n, double raw_pairs, const FiberParams& params) {
  if (n == 0) return time_direct(length_km, params) * raw_pairs;
  const double d = length_km / (2.0 * n);
  return link_time(d, d, params) * raw_pairs * waiting_factor(n) / params.multiplex;
}

// Per-link expected completion time, excluding the waiting factor.
double own_link_time(double length_km, int n, double raw_pairs, const FiberParams& params) {
  if (n == 0) return time_direct(length_km, params) * raw_pairs;
  const double d = length_km / (2.0 * n);
  return link_time(d, d, params) * raw_pairs / params.multiplex;
}

}  // namespace

ChainResult distilled_rate(double length_km, double target_fidelity,
                           const bell::NoiseParams& noise, const FiberParams& params, int max_n) {
  params.validate();
  noise.validate();
  if (!(length_km > 0.0)) throw ParamError("length_km must be positive");
  if (!(target_fidelity > 0.5 && target_fidelity < 1.0))
    throw ParamError("target_fidelity must lie in (0.5, 1)");

  ChainResult best;
  best.feasible = false;
  best.state = bell::BellDiagonalState::psi_mixture(0.0);

  const double f_ii = bell::ion_ion_after_photon_bsm(noise).fidelity();
  for (int r = 0; r <= kMaxDistillRounds; ++r) {
    // Direct link: the ion-photon pair is stored at the far end, no
    // photon Bell measurement involved.
    const bell::DistillPlan direct = bell::nested_distill(noise.f0, r);
    if (direct.fidelity >= target_fidelity) {
      const double t = config_time(length_km, 0, direct.expected_raw_pairs, params);
      if (!best.feasible || 1.0 / t > best.rate_hz) {
        best = {0, r, 1.0 / t, direct.fidelity,
                bell::BellDiagonalState::psi_mixture(direct.fidelity), true};
      }
    }

    const bell::DistillPlan plan = bell::nested_distill(f_ii, r);
    const bell::BellDiagonalState link = bell::BellDiagonalState::psi_mixture(plan.fidelity);
    bell::BellDiagonalState chain = link;
    for (int n = 1; n <= max_n; ++n) {
      if (n > 1) chain = bell::swap_dbsm(chain, link, noise.f_swap_ion);
      if (chain.fidelity() < target_fidelity) break;  // strictly decreasing in n
      const double t = config_time(length_km, n, plan.expected_raw_pairs, params);
      const double rate = 1.0 / t;
      if (!best.feasible || rate > best.rate_hz)
        best = {n, r, rate, chain.fidelity(), chain, true};
    }
  }
  return best;
}

ChainResult fidelity_in_time_budget(double length_km, double budget_s,
                                    const bell::NoiseParams& noise, const FiberParams& params,
                                    int max_n) {
  params.validate();
  noise.validate();
  if (!(length_km > 0.0)) throw ParamError("length_km must be positive");
  if (!(budget_s > 0.0)) throw ParamError("budget_s must be positive");

  ChainResult best;
  best.feasible = false;
  best.state = bell::BellDiagonalState::psi_mixture(0.0);

  const double f_ii = bell::ion_ion_after_photon_bsm(noise).fidelity();
  for (int r = 0; r <= kMaxDistillRounds; ++r) {
    const bell::DistillPlan direct = bell::nested_distill(noise.f0, r);
    const double t_direct = config_time(length_km, 0, direct.expected_raw_pairs, params);
    if (t_direct <= budget_s) {
      bell::BellDiagonalState s = bell::BellDiagonalState::psi_mixture(direct.fidelity);
      s = bell::dephase(s, budget_s - t_direct, noise.tau_q);
      if (!best.feasible || s.fidelity() > best.fidelity)
        best = {0, r, 1.0 / budget_s, s.fidelity(), s, true};
    }

    const bell::DistillPlan plan = bell::nested_distill(f_ii, r);
    bool any_feasible = t_direct <= budget_s;
    for (int n = 1; n <= max_n; ++n) {
      const double t_total = config_time(length_km, n, plan.expected_raw_pairs, params);
      if (t_total > budget_s) continue;
      any_feasible = true;
      const double t_own = own_link_time(length_km, n, plan.expected_raw_pairs, params);
      bell::BellDiagonalState link = bell::BellDiagonalState::psi_mixture(plan.fidelity);
      link = bell::dephase(link, std::max(0.0, budget_s - t_own), noise.tau_q);
      bell::BellDiagonalState chain = link;
      for (int i = 1; i < n; ++i) chain = bell::swap_dbsm(chain, link, noise.f_swap_ion);
      if (!best.feasible || chain.fidelity() > best.fidelity)
        best = {n, r, 1.0 / budget_s, chain.fidelity(), chain, true};
      // For a fixed r the fidelity only drops as n grows; the first
      // feasible n is the best one.
      break;
    }
    if (!any_feasible) break;  // more rounds only cost more time
  }
  return best;
}

}  // namespace qnet::fiber
