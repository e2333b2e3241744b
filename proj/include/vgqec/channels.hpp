// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vgqec/qcore.hpp"

namespace vgqec {

/// CPTP map in Kraus form: rho -> sum_k K_k rho K_k^dag with
/// sum_k K_k^dag K_k = I on the input space.
struct KrausChannel {
  std::vector<ComplexMatrix> kraus_ops;
  Index din = 0;
  Index dout = 0;

  Index dim_in() const { return din; }
  Index dim_out() const { return dout; }

  ComplexMatrix apply_matrix(const ComplexMatrix& rho) const {
    ComplexMatrix out = ComplexMatrix::Zero(dout, dout);
    for (const auto& k : kraus_ops) out.noalias() += k * rho * k.adjoint();
    return out;
  }

  /// Heisenberg-picture action: X -> sum_k K_k^dag X K_k.
  ComplexMatrix apply_adjoint(const ComplexMatrix& x) const {
    ComplexMatrix out = ComplexMatrix::Zero(din, din);
    for (const auto& k : kraus_ops) out.noalias() += k.adjoint() * x * k;
    return out;
  }

  /// Deviation of sum K^dag K from the identity (max-abs entry).
  double trace_preservation_defect() const {
    ComplexMatrix acc = ComplexMatrix::Zero(din, din);
    for (const auto& k : kraus_ops) acc.noalias() += k.adjoint() * k;
    return max_abs_diff(acc, ComplexMatrix::Identity(din, din));
  }

  void check_trace_preserving(double tol = 1e-10) const {
    double defect = trace_preservation_defect();
    if (defect > tol)
      throw std::invalid_argument("KrausChannel: sum K^dag K deviates from identity by " +
                                  std::to_string(defect));
  }

  static KrausChannel from_ops(std::vector<ComplexMatrix> ops) {
    if (ops.empty()) throw std::invalid_argument("KrausChannel: empty Kraus set");
    KrausChannel ch{std::move(ops), 0, 0};
    ch.dout = ch.kraus_ops.front().rows();
    ch.din = ch.kraus_ops.front().cols();
    for (const auto& k : ch.kraus_ops)
      if (k.rows() != ch.dout || k.cols() != ch.din)
        throw std::invalid_argument("KrausChannel: inconsistent Kraus dimensions");
    return ch;
  }
};

/// Anything that can act on a density operator. KrausChannel models this, as
/// does ChannelSequence; the heavier algorithms are templated on it so that
/// composite noise never has to be flattened into one huge Kraus set.
template <class C>
concept channel_like = requires(const C& c, const ComplexMatrix& rho) {
  { c.dim_in() } -> std::convertible_to<Index>;
  { c.dim_out() } -> std::convertible_to<Index>;
  { c.apply_matrix(rho) } -> std::convertible_to<ComplexMatrix>;
  { c.apply_adjoint(rho) } -> std::convertible_to<ComplexMatrix>;
};

/// Stages applied left to right: rho -> s_n(...s_1(rho)).
struct ChannelSequence {
  std::vector<KrausChannel> stages;

  Index dim_in() const { return stages.front().din; }
  Index dim_out() const { return stages.back().dout; }

  ComplexMatrix apply_matrix(ComplexMatrix rho) const {
    for (const auto& s : stages) rho = s.apply_matrix(rho);
    return rho;
  }

  ComplexMatrix apply_adjoint(ComplexMatrix x) const {
    for (auto it = stages.rbegin(); it != stages.rend(); ++it) x = it->apply_adjoint(x);
    return x;
  }
};

/// second ∘ first without flattening the Kraus sets.
template <channel_like A, channel_like B>
struct ComposedChannel {
  const A& first;
  const B& second;

  Index dim_in() const { return first.dim_in(); }
  Index dim_out() const { return second.dim_out(); }
  ComplexMatrix apply_matrix(const ComplexMatrix& rho) const {
    return second.apply_matrix(first.apply_matrix(rho));
  }
  ComplexMatrix apply_adjoint(const ComplexMatrix& x) const {
    return first.apply_adjoint(second.apply_adjoint(x));
  }
};

template <channel_like C>
DensityMatrix apply(const C& ch, const DensityMatrix& rho) {
  if (rho.dimension() != ch.dim_in())
    throw std::invalid_argument("apply: channel/state dimension mismatch");
  return DensityMatrix{ch.apply_matrix(rho.matrix)};
}

/// Kraus set of second∘first: {S_j F_i}.
inline KrausChannel compose(const KrausChannel& second, const KrausChannel& first) {
  if (first.dout != second.din)
    throw std::invalid_argument("compose: inner dimension mismatch");
  std::vector<ComplexMatrix> ops;
  ops.reserve(second.kraus_ops.size() * first.kraus_ops.size());
  for (const auto& s : second.kraus_ops)
    for (const auto& f : first.kraus_ops) ops.push_back(s * f);
  return KrausChannel{std::move(ops), first.din, second.dout};
}

/// Kraus set of the tensor product channel: all products of component ops.
inline KrausChannel tensor_channels(const std::vector<KrausChannel>& parts) {
  if (parts.empty()) throw std::invalid_argument("tensor_channels: empty sequence");
  std::vector<ComplexMatrix> ops = {ComplexMatrix::Identity(1, 1)};
  Index din = 1, dout = 1;
  for (const auto& p : parts) {
    std::vector<ComplexMatrix> next;
    next.reserve(ops.size() * p.kraus_ops.size());
    for (const auto& a : ops)
      for (const auto& k : p.kraus_ops) next.push_back(tensor(a, k));
    ops = std::move(next);
    din *= p.din;
    dout *= p.dout;
  }
  return KrausChannel{std::move(ops), din, dout};
}

inline KrausChannel identity_channel(Index dim) {
  return KrausChannel{{ComplexMatrix::Identity(dim, dim)}, dim, dim};
}

/// Embeds a single-qubit channel on qubit q (1-based, qubit 1 most
/// significant) of an n-qubit system.
inline KrausChannel embed_single_qubit(const KrausChannel& ch, int q, int n) {
  if (ch.din != 2 || ch.dout != 2)
    throw std::invalid_argument("embed_single_qubit: channel is not single-qubit");
  if (q < 1 || q > n) throw std::invalid_argument("embed_single_qubit: qubit out of range");
  ComplexMatrix left = ComplexMatrix::Identity(Index{1} << (q - 1), Index{1} << (q - 1));
  ComplexMatrix right = ComplexMatrix::Identity(Index{1} << (n - q), Index{1} << (n - q));
  std::vector<ComplexMatrix> ops;
  ops.reserve(ch.kraus_ops.size());
  for (const auto& k : ch.kraus_ops) ops.push_back(tensor(tensor(left, k), right));
  return KrausChannel{std::move(ops), Index{1} << n, Index{1} << n};
}

// ---------------------------------------------------------------------------
// Choi form

/// Choi matrix with the input factor first:
///   C = sum_{mn} |m><n| (x) ch(|m><n|),  dim = din*dout.
/// CPTP <=> C is PSD and the partial trace over the output factor is I_din.
struct ChoiMatrix {
  ComplexMatrix matrix;
  Index din = 0;
  Index dout = 0;
};

template <channel_like C>
ChoiMatrix choi_of(const C& ch) {
  Index din = ch.dim_in(), dout = ch.dim_out();
  ComplexMatrix choi = ComplexMatrix::Zero(din * dout, din * dout);
  ComplexMatrix basis = ComplexMatrix::Zero(din, din);
  for (Index m = 0; m < din; ++m)
    for (Index n = 0; n < din; ++n) {
      basis(m, n) = 1.0;
      choi.block(m * dout, n * dout, dout, dout) = ch.apply_matrix(basis);
      basis(m, n) = 0.0;
    }
  return ChoiMatrix{std::move(choi), din, dout};
}

inline ChoiMatrix kraus_to_choi(const KrausChannel& ch) { return choi_of(ch); }

/// Eigendecomposes the Choi matrix; eigenvalues below `cutoff` are dropped.
/// Throws if the Choi form is not PSD / trace preserving beyond tolerance.
inline KrausChannel choi_to_kraus(const ChoiMatrix& c, double cutoff = 1e-12,
                                  double tol = 1e-8) {
  HermitianEig eig = hermitian_eig(c.matrix, tol);
  if (eig.eigenvalues.minCoeff() < -tol)
    throw std::invalid_argument("choi_to_kraus: Choi matrix not PSD within tolerance");
  std::vector<ComplexMatrix> ops;
  for (Index e = 0; e < eig.eigenvalues.size(); ++e) {
    double w = eig.eigenvalues(e);
    if (w < cutoff) continue;
    ComplexMatrix k(c.dout, c.din);
    for (Index m = 0; m < c.din; ++m)
      for (Index a = 0; a < c.dout; ++a) k(a, m) = std::sqrt(w) * eig.eigenvectors(m * c.dout + a, e);
    ops.push_back(std::move(k));
  }
  if (ops.empty()) throw std::invalid_argument("choi_to_kraus: channel is numerically zero");
  KrausChannel ch{std::move(ops), c.din, c.dout};
  ch.check_trace_preserving(tol);
  return ch;
}

// ---------------------------------------------------------------------------
// Fidelity metrics

/// F_C = (1/d^2) sum_j |Tr M_j|^2; requires a square channel.
inline double channel_fidelity(const KrausChannel& ch) {
  if (ch.din != ch.dout) throw std::invalid_argument("channel_fidelity: channel not square");
  double acc = 0.0;
  for (const auto& k : ch.kraus_ops) acc += std::norm(k.trace());
  double d = static_cast<double>(ch.din);
  return acc / (d * d);
}

/// Generic form evaluated through the Choi matrix,
///   F_C = <Omega| Choi |Omega> / d^2,
/// usable for channels that only expose their action.
template <channel_like C>
double channel_fidelity_via_choi(const C& ch) {
  if (ch.dim_in() != ch.dim_out())
    throw std::invalid_argument("channel_fidelity: channel not square");
  Index d = ch.dim_in();
  ChoiMatrix choi = choi_of(ch);
  Complex acc = 0.0;
  for (Index m = 0; m < d; ++m)
    for (Index n = 0; n < d; ++n) acc += choi.matrix(m * d + m, n * d + n);
  return acc.real() / static_cast<double>(d * d);
}

/// F_e(rho, M) = sum_j |Tr(rho M_j)|^2; for pure rho this equals
/// <psi|M(|psi><psi|)|psi>.
inline double entanglement_fidelity(const DensityMatrix& rho, const KrausChannel& ch) {
  if (rho.dimension() != ch.din || ch.din != ch.dout)
    throw std::invalid_argument("entanglement_fidelity: dimension mismatch");
  double acc = 0.0;
  for (const auto& k : ch.kraus_ops) acc += std::norm((rho.matrix * k).trace());
  return acc;
}

// ---------------------------------------------------------------------------
// Concrete noise models

/// Energy loss toward |0>: E0 = diag(1, sqrt(1-gamma)), E1 = sqrt(gamma)|0><1|.
inline KrausChannel amplitude_damping(double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("amplitude_damping: gamma out of [0,1]");
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2), e1 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - gamma);
  e1(0, 1) = std::sqrt(gamma);
  return KrausChannel{{e0, e1}, 2, 2};
}

/// Phase-amplitude damping over wait time t with coherence times T1, T2
/// (same units, T2 <= 2*T1):
///   A1 = diag(1, sqrt(1-gamma-lambda)), A2 = sqrt(gamma)|0><1|,
///   A3 = sqrt(lambda)|1><1|,
/// with gamma = 1-exp(-t/T1) and lambda = exp(-t/T1) - exp(-2t/T2), the
/// unique choice making the off-diagonal decay factor exp(-t/T2).
inline KrausChannel thermal_relaxation(double t, double t1, double t2) {
  if (t < 0.0) throw std::invalid_argument("thermal_relaxation: negative time");
  if (t1 <= 0.0 || t2 <= 0.0) throw std::invalid_argument("thermal_relaxation: T1,T2 must be positive");
  if (t2 > 2.0 * t1 + 1e-12) throw std::invalid_argument("thermal_relaxation: requires T2 <= 2*T1");
  double gamma = 1.0 - std::exp(-t / t1);
  double lambda = std::exp(-t / t1) - std::exp(-2.0 * t / t2);
  if (lambda < 0.0 && lambda > -1e-14) lambda = 0.0;
  ComplexMatrix a1 = ComplexMatrix::Zero(2, 2), a2 = ComplexMatrix::Zero(2, 2),
                a3 = ComplexMatrix::Zero(2, 2);
  a1(0, 0) = 1.0;
  a1(1, 1) = std::sqrt(1.0 - gamma - lambda);
  a2(0, 1) = std::sqrt(gamma);
  a3(1, 1) = std::sqrt(lambda);
  return KrausChannel{{a1, a2, a3}, 2, 2};
}

/// rho -> (1-p) rho + p X rho X.
inline KrausChannel bit_flip(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("bit_flip: p out of [0,1]");
  return KrausChannel{{std::sqrt(1.0 - p) * pauli_i(), std::sqrt(p) * pauli_x()}, 2, 2};
}

/// rho -> (1-p) rho + p I/2, as a 4-element Pauli Kraus set.
inline KrausChannel depolarizing(double p) {
  if (p < 0.0 || p > 4.0 / 3.0) throw std::invalid_argument("depolarizing: p out of range");
  double w = p / 4.0;
  return KrausChannel{{std::sqrt(1.0 - 3.0 * w) * pauli_i(), std::sqrt(w) * pauli_x(),
                       std::sqrt(w) * pauli_y(), std::sqrt(w) * pauli_z()},
                      2, 2};
}

/// Linear interpolation from dephasing (eta=0) to depolarizing-like noise:
///   rho -> 0.05 (Z rho Z + eta X rho X + eta Y rho Y) + (0.95 - 0.1 eta) rho.
inline KrausChannel interpolated_pauli(double eta) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("interpolated_pauli: eta out of [0,1]");
  return KrausChannel{{std::sqrt(0.95 - 0.1 * eta) * pauli_i(), std::sqrt(0.05) * pauli_z(),
                       std::sqrt(0.05 * eta) * pauli_x(), std::sqrt(0.05 * eta) * pauli_y()},
                      2, 2};
}

/// Correlated two-qubit flip on the pair (i, i+1), 1-based, of n qubits:
///   rho -> (1-p) rho + p X_i X_{i+1} rho X_i X_{i+1}.
inline KrausChannel correlated_xx(double p_xx, int i, int n) {
  if (i < 1 || i >= n) throw std::invalid_argument("correlated_xx: pair index out of range");
  if (p_xx < 0.0 || p_xx > 1.0) throw std::invalid_argument("correlated_xx: p out of [0,1]");
  std::string spec(static_cast<size_t>(n), 'I');
  spec[static_cast<size_t>(i - 1)] = 'X';
  spec[static_cast<size_t>(i)] = 'X';
  Index dim = Index{1} << n;
  return KrausChannel{{std::sqrt(1.0 - p_xx) * ComplexMatrix::Identity(dim, dim),
                       std::sqrt(p_xx) * pauli_string(spec, n)},
                      dim, dim};
}

/// The five-qubit composite noise N = N3 ∘ N2 ∘ N1^eta kept in staged form:
/// N1 = interpolated_pauli(eta) on every qubit, N2 = correlated XX pairs at
/// p=0.05 in ascending pair index, N3 = amplitude damping 0.05 on every qubit.
inline ChannelSequence interpolation_noise_stages(double eta) {
  ChannelSequence seq;
  for (int q = 1; q <= 5; ++q) seq.stages.push_back(embed_single_qubit(interpolated_pauli(eta), q, 5));
  for (int i = 1; i <= 4; ++i) seq.stages.push_back(correlated_xx(0.05, i, 5));
  for (int q = 1; q <= 5; ++q) seq.stages.push_back(embed_single_qubit(amplitude_damping(0.05), q, 5));
  return seq;
}

/// Same channel flattened to a single Kraus set (via its Choi form, the one
/// place where near-zero Kraus directions are dropped).
inline KrausChannel interpolation_noise(double eta) {
  return choi_to_kraus(choi_of(interpolation_noise_stages(eta)), 1e-12, 1e-8);
}

}  // namespace vgqec
