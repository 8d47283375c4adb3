#include "qnet/bell.hpp"

#include <algorithm>
#include <cmath>

namespace qnet::bell {

namespace {

// Clamp tiny negatives, renormalize small drift, reject anything larger.
BellDiagonalState normalized(BellDiagonalState s) {
  double sum = 0.0;
  for (double& v : s.w) {
    if (v < 0.0) {
      if (v < -1e-12) throw InternalError("Bell weight drifted negative: " + std::to_string(v));
      v = 0.0;
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InternalError("Bell weights drifted off normalization: sum=" + std::to_string(sum));
  for (double& v : s.w) v /= sum;
  return s;
}

void check_fidelity_domain(double f, const char* name) {
  if (!(f >= 0.5 && f <= 1.0))
    throw ParamError(std::string(name) + " must lie in [0.5, 1], got " + std::to_string(f));
}

}  // namespace

BellDiagonalState BellDiagonalState::psi_mixture(double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw ParamError("mixture fidelity outside [0, 1]");
  BellDiagonalState s;
  s.w[kPsiMinus] = f;
  s.w[kPsiPlus] = 1.0 - f;
  return s;
}

void BellDiagonalState::validate() const {
  double sum = 0.0;
  for (double v : w) {
    if (v < 0.0) throw ParamError("negative Bell weight");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ParamError("Bell weights do not sum to 1");
}

void NoiseParams::validate() const {
  check_fidelity_domain(f0, "f0");
  check_fidelity_domain(f_swap_photon, "f_swap_photon");
  check_fidelity_domain(f_swap_ion, "f_swap_ion");
  if (!(tau_q > 0.0)) throw ParamError("tau_q must be positive (or infinite)");
}

BellDiagonalState ion_ion_after_photon_bsm(const NoiseParams& noise) {
  noise.validate();
  const double visibility = 2.0 * noise.f_swap_photon - 1.0;
  const double d = 1.0 - 2.0 * noise.f0;
  const double f_ii = (1.0 + visibility * d * d) / 2.0;
  return BellDiagonalState::psi_mixture(f_ii);
}

BellDiagonalState swap_dbsm(const BellDiagonalState& a, const BellDiagonalState& b,
                            double f_swap_ion) {
  check_fidelity_domain(f_swap_ion, "f_swap_ion");
  a.validate();
  b.validate();

  // Ideal swap: projecting the middle qubits onto Psi- composes the
  // Pauli labels of the two inputs, which is XOR in this encoding.
  double ideal[4] = {0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) ideal[i ^ j ^ kPsiMinus] += a.w[i] * b.w[j];

  // Depolarizing noise of the measurement. Conjugation by I x sigma_j
  // is XOR with the corresponding Bell label: Sz=PhiMinus, Sx=PsiPlus,
  // Sy=PsiMinus.
  const double keep = f_swap_ion;
  const double leak = (1.0 - f_swap_ion) / 3.0;
  BellDiagonalState out;
  for (int k = 0; k < 4; ++k)
    out.w[k] = keep * ideal[k] +
               leak * (ideal[k ^ kPhiMinus] + ideal[k ^ kPsiPlus] + ideal[k ^ kPsiMinus]);
  return normalized(out);
}

BellDiagonalState dephase(const BellDiagonalState& s, double t_s, double tau_q) {
  if (t_s < 0.0) throw ParamError("dephasing time must be nonnegative");
  if (!(tau_q > 0.0)) throw ParamError("tau_q must be positive (or infinite)");
  s.validate();
  if (std::isinf(tau_q) || t_s == 0.0) return s;

  const double ratio = t_s / tau_q;
  const double q = (1.0 - std::exp(-ratio * ratio)) / 2.0;
  BellDiagonalState out;
  for (int k = 0; k < 4; ++k) out.w[k] = (1.0 - q) * s.w[k] + q * s.w[k ^ kPhiMinus];
  return normalized(out);
}

DistillStep distill(double f1, double f2) {
  check_fidelity_domain(f1, "f1");
  check_fidelity_domain(f2, "f2");
  const double num = 10.0 * f1 * f2 - f1 - f2 + 1.0;
  const double den = 8.0 * f1 * f2 - 2.0 * f1 - 2.0 * f2 + 5.0;
  return {num / den, den / 9.0};
}

DistillPlan nested_distill(double f, int rounds) {
  if (rounds < 0) throw ParamError("distillation rounds must be nonnegative");
  check_fidelity_domain(f, "f");
  DistillPlan plan{f, 1.0};
  for (int r = 0; r < rounds; ++r) {
    const DistillStep step = distill(plan.fidelity, plan.fidelity);
    plan.expected_raw_pairs *= 2.0 / step.p_success;
    plan.fidelity = step.fidelity;
  }
  return plan;
}

BellDiagonalState chain_fidelity(std::span<const BellDiagonalState> links, double f_swap_ion) {
  if (links.empty()) throw UsageError("chain_fidelity requires at least one link");
  BellDiagonalState acc = links[0];
  for (std::size_t i = 1; i < links.size(); ++i) acc = swap_dbsm(acc, links[i], f_swap_ion);
  return acc;
}

}  // namespace qnet::bell
