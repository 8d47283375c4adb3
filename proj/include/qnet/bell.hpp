#pragma once

#include <span>

#include "qnet/common.hpp"

namespace qnet::bell {

// Bell-basis index encoding: bit 0 is the phase bit, bit 1 the parity
// bit, so Pauli conjugation and entanglement swapping both reduce to
// XOR on indices.
enum BellIndex : int { kPhiPlus = 0, kPhiMinus = 1, kPsiPlus = 2, kPsiMinus = 3 };

/// Two-qubit mixed state diagonal in the Bell basis. The fidelity of
/// interest everywhere is the Psi- weight.
struct BellDiagonalState {
  double w[4] = {0.0, 0.0, 0.0, 0.0};  // indexed by BellIndex

  double phi_plus() const { return w[kPhiPlus]; }
  double phi_minus() const { return w[kPhiMinus]; }
  double psi_plus() const { return w[kPsiPlus]; }
  double psi_minus() const { return w[kPsiMinus]; }
  double fidelity() const { return w[kPsiMinus]; }

  static BellDiagonalState pure_psi_minus() {
    BellDiagonalState s;
    s.w[kPsiMinus] = 1.0;
    return s;
  }

  /// f on Psi-, remainder on Psi+ (the two-component mixture used for
  /// ion-photon sources, distilled links, and satellite pairs).
  static BellDiagonalState psi_mixture(double f);

  void validate() const;
};

struct NoiseParams {
  double f0 = 0.99;            // initial ion-photon fidelity
  double f_swap_photon = 0.99; // photon BSM fidelity
  double f_swap_ion = 0.99;    // deterministic ion BSM fidelity
  double tau_q = kInfiniteTau; // decoherence time, seconds

  void validate() const;
};

/// Ion-ion state after a successful photon Bell state measurement:
/// F_ii = (1 + V (1 - 2 F0)^2) / 2 with visibility V = 2 F_swap_p - 1.
BellDiagonalState ion_ion_after_photon_bsm(const NoiseParams& noise);

/// Entanglement swap of two Bell-diagonal pairs through a deterministic
/// Bell measurement, followed by the depolarizing channel
/// rho' = F rho + (1-F)/3 (Sz rho Sz + Sy rho Sy + Sx rho Sx).
BellDiagonalState swap_dbsm(const BellDiagonalState& a, const BellDiagonalState& b,
                            double f_swap_ion);

/// Memory dephasing for a storage time t:
/// rho(t) = (1 - q) rho + q Sz rho Sz, q = (1 - exp(-t^2/tau^2)) / 2,
/// so rho(0) = rho and rho(inf) is the even Sz mixture.
BellDiagonalState dephase(const BellDiagonalState& s, double t_s, double tau_q);

struct DistillStep {
  double fidelity;
  double p_success;
};

/// One 2->1 recurrence purification step on two pairs of fidelity f1, f2.
DistillStep distill(double f1, double f2);

struct DistillPlan {
  double fidelity;
  double expected_raw_pairs;
};

/// `rounds` iterations of distill() on identical inputs (a binary tree
/// consuming 2^rounds raw pairs); expected_raw_pairs accounts for the
/// retries, product over rounds of 2/p_success.
DistillPlan nested_distill(double f, int rounds);

/// Left fold of swap_dbsm over the links of a chain.
BellDiagonalState chain_fidelity(std::span<const BellDiagonalState> links, double f_swap_ion);

}  // namespace qnet::bell
