#include "qnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace qnet::oracle {

namespace {

using cplx = std::complex<double>;
using Matrix = std::vector<cplx>;  // row-major, square

Matrix zeros(int n) { return Matrix(static_cast<std::size_t>(n) * n, cplx(0.0, 0.0)); }

Matrix mul(const Matrix& a, const Matrix& b, int n) {
  Matrix c = zeros(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const cplx aik = a[i * n + k];
      if (aik == cplx(0.0, 0.0)) continue;
      for (int j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
    }
  return c;
}

Matrix kron(const Matrix& a, int na, const Matrix& b, int nb) {
  const int n = na * nb;
  Matrix c = zeros(n);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l) c[(i * nb + k) * n + (j * nb + l)] = a[i * na + j] * b[k * nb + l];
  return c;
}

Matrix dagger(const Matrix& a, int n) {
  Matrix c = zeros(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c[i * n + j] = std::conj(a[j * n + i]);
  return c;
}

cplx trace(const Matrix& a, int n) {
  cplx t = 0.0;
  for (int i = 0; i < n; ++i) t += a[i * n + i];
  return t;
}

// Bell state vectors in the computational basis |q1 q2>, matching the
// index encoding of bell::BellIndex.
void bell_vector(int idx, cplx out[4]) {
  const double s = 1.0 / std::sqrt(2.0);
  std::fill(out, out + 4, cplx(0.0, 0.0));
  switch (idx) {
    case bell::kPhiPlus: out[0] = s; out[3] = s; break;
    case bell::kPhiMinus: out[0] = s; out[3] = -s; break;
    case bell::kPsiPlus: out[1] = s; out[2] = s; break;
    case bell::kPsiMinus: out[1] = s; out[2] = -s; break;
    default: throw InternalError("bad Bell index");
  }
}

// 4x4 density matrix of a Bell-diagonal state.
Matrix bell_density(const bell::BellDiagonalState& s) {
  Matrix rho = zeros(4);
  for (int k = 0; k < 4; ++k) {
    cplx v[4];
    bell_vector(k, v);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) rho[i * 4 + j] += s.w[k] * v[i] * std::conj(v[j]);
  }
  return rho;
}

Matrix pauli(int axis) {
  Matrix m = zeros(2);
  switch (axis) {
    case 0:  // identity
      m[0] = 1.0; m[3] = 1.0; break;
    case 1:  // sigma_x
      m[1] = 1.0; m[2] = 1.0; break;
    case 2:  // sigma_y
      m[1] = cplx(0.0, -1.0); m[2] = cplx(0.0, 1.0); break;
    case 3:  // sigma_z
      m[0] = 1.0; m[3] = -1.0; break;
    default: throw InternalError("bad Pauli axis");
  }
  return m;
}

std::uint64_t splitmix_once(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Geometric sample on {1, 2, ...} by inverse transform.
std::int64_t geometric_rounds(Rng& rng, double p) {
  if (p >= 1.0) return 1;
  const double u = rng.uniform01();
  return 1 + static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

}  // namespace

double mc_waiting_rounds_batched(int n_segment_pairs, double p_success, const McConfig& cfg,
                                 int batches, double* batch_means) {
  if (n_segment_pairs < 1) throw ParamError("need at least one segment pair");
  if (!(p_success > 0.0 && p_success <= 1.0)) throw ParamError("p_success must be in (0, 1]");
  if (cfg.trials < 1) throw ParamError("trials must be >= 1");
  if (batches < 1) throw ParamError("batches must be >= 1");

  const std::int64_t per_batch = std::max<std::int64_t>(1, cfg.trials / batches);
  double total = 0.0;
  std::int64_t total_trials = 0;
  for (int b = 0; b < batches; ++b) {
    Rng rng(splitmix_once(cfg.seed ^ (0xb5ad4eceda1ce2a9ULL * (b + 1))));
    double batch_sum = 0.0;
    for (std::int64_t t = 0; t < per_batch; ++t) {
      std::int64_t worst = 0;
      for (int s = 0; s < n_segment_pairs; ++s)
        worst = std::max(worst, geometric_rounds(rng, p_success));
      batch_sum += static_cast<double>(worst);
    }
    if (batch_means) batch_means[b] = batch_sum / static_cast<double>(per_batch);
    total += batch_sum;
    total_trials += per_batch;
  }
  return total / static_cast<double>(total_trials);
}

double mc_waiting_rounds(int n_segment_pairs, double p_success, const McConfig& cfg) {
  return mc_waiting_rounds_batched(n_segment_pairs, p_success, cfg, 1, nullptr);
}

namespace {

// Raw pairs consumed to output one round-r pair; failed merges consume
// both inputs and retry.
std::int64_t distill_cost(Rng& rng, const std::vector<double>& p_round, int r) {
  if (r == 0) return 1;
  std::int64_t total = 0;
  for (;;) {
    total += distill_cost(rng, p_round, r - 1) + distill_cost(rng, p_round, r - 1);
    if (rng.uniform01() < p_round[r - 1]) return total;
  }
}

}  // namespace

McDistillYield mc_distill_yield(double f, int rounds, const McConfig& cfg) {
  if (!(f > 0.5 && f <= 1.0)) throw ParamError("distillable fidelity must be in (0.5, 1]");
  if (rounds < 0) throw ParamError("rounds must be nonnegative");
  if (cfg.trials < 1) throw ParamError("trials must be >= 1");

  // Per-round success probabilities from the deterministic recurrence.
  std::vector<double> p_round;
  double fr = f;
  for (int r = 0; r < rounds; ++r) {
    const bell::DistillStep step = bell::distill(fr, fr);
    p_round.push_back(step.p_success);
    fr = step.fidelity;
  }

  Rng rng(splitmix_once(cfg.seed));
  double total = 0.0;
  for (std::int64_t t = 0; t < cfg.trials; ++t)
    total += static_cast<double>(distill_cost(rng, p_round, rounds));
  return {total / static_cast<double>(cfg.trials), fr};
}

bell::BellDiagonalState dm_swap_oracle(const bell::BellDiagonalState& a,
                                       const bell::BellDiagonalState& b, double f_swap) {
  a.validate();
  b.validate();
  if (!(f_swap >= 0.0 && f_swap <= 1.0)) throw ParamError("f_swap outside [0, 1]");

  // Qubit order (1,2,3,4): pair a on (1,2), pair b on (3,4).
  const Matrix rho = kron(bell_density(a), 4, bell_density(b), 4);

  // Projector I (x) |Psi-><Psi-|_{23} (x) I.
  cplx psim[4];
  bell_vector(bell::kPsiMinus, psim);
  Matrix proj23 = zeros(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) proj23[i * 4 + j] = psim[i] * std::conj(psim[j]);
  Matrix id2 = pauli(0);
  Matrix projector = kron(kron(id2, 2, proj23, 4), 8, id2, 2);

  Matrix projected = mul(mul(projector, rho, 16), dagger(projector, 16), 16);
  const double p = trace(projected, 16).real();
  if (p <= 1e-14) throw InternalError("projection has vanishing probability");

  // Partial trace over qubits 2 and 3 -> 4x4 state of qubits (1,4).
  Matrix reduced = zeros(4);
  for (int q1 = 0; q1 < 2; ++q1)
    for (int q4 = 0; q4 < 2; ++q4)
      for (int p1 = 0; p1 < 2; ++p1)
        for (int p4 = 0; p4 < 2; ++p4) {
          cplx sum = 0.0;
          for (int q2 = 0; q2 < 2; ++q2)
            for (int q3 = 0; q3 < 2; ++q3) {
              const int row = ((q1 * 2 + q2) * 2 + q3) * 2 + q4;
              const int col = ((p1 * 2 + q2) * 2 + q3) * 2 + p4;
              sum += projected[row * 16 + col];
            }
          reduced[(q1 * 2 + q4) * 4 + (p1 * 2 + p4)] = sum / p;
        }

  // Depolarizing channel in matrix form, noise on the second qubit.
  Matrix out = zeros(4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f_swap * reduced[i];
  for (int axis = 1; axis <= 3; ++axis) {
    const Matrix s = kron(id2, 2, pauli(axis), 2);
    const Matrix term = mul(mul(s, reduced, 4), dagger(s, 4), 4);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (1.0 - f_swap) / 3.0 * term[i];
  }

  // Sanity: trace one, Hermitian, and Bell-diagonal to numerical noise.
  if (std::abs(trace(out, 4).real() - 1.0) > 1e-12 || std::abs(trace(out, 4).imag()) > 1e-12)
    throw InternalError("oracle output trace deviates from 1");
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (std::abs(out[i * 4 + j] - std::conj(out[j * 4 + i])) > 1e-12)
        throw InternalError("oracle output is not Hermitian");

  bell::BellDiagonalState result;
  double offdiag = 0.0;
  for (int k = 0; k < 4; ++k) {
    cplx vk[4];
    bell_vector(k, vk);
    for (int l = 0; l < 4; ++l) {
      cplx vl[4];
      bell_vector(l, vl);
      cplx elem = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) elem += std::conj(vk[i]) * out[i * 4 + j] * vl[j];
      if (k == l)
        result.w[k] = elem.real();
      else
        offdiag = std::max(offdiag, std::abs(elem));
    }
  }
  if (offdiag > 1e-12) throw InternalError("oracle output has Bell off-diagonal residue");
  return result;
}

}  // namespace qnet::oracle
