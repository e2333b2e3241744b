// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "vgqec/channels.hpp"
#include "vgqec/codes.hpp"
#include "vgqec/qcore.hpp"

namespace vgqec {

enum class GateKind { H, CNOT, RX, RZ, RZZ };

/// One gate. Qubit targets are 1-based with qubit 1 the most-significant
/// tensor factor. Rotations either carry a fixed angle (slot < 0) or read
/// their angle from a free-parameter slot.
struct Gate {
  GateKind kind;
  std::array<int, 2> targets{0, 0};
  double fixed_angle = 0.0;
  int slot = -1;

  static Gate h(int q) { return {GateKind::H, {q, 0}}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}}; }
  static Gate rx(int q, int slot) { return {GateKind::RX, {q, 0}, 0.0, slot}; }
  static Gate rz(int q, int slot) { return {GateKind::RZ, {q, 0}, 0.0, slot}; }
  static Gate rzz(int a, int b, int slot) { return {GateKind::RZZ, {a, b}, 0.0, slot}; }
  static Gate rx_fixed(int q, double angle) { return {GateKind::RX, {q, 0}, angle, -1}; }
  static Gate rz_fixed(int q, double angle) { return {GateKind::RZ, {q, 0}, angle, -1}; }
  static Gate rzz_fixed(int a, int b, double angle) { return {GateKind::RZZ, {a, b}, angle, -1}; }

  bool two_qubit() const { return kind == GateKind::CNOT || kind == GateKind::RZZ; }
};

struct Circuit {
  int qubit_count = 0;
  std::vector<Gate> gates;
  int parameter_count = 0;

  void validate() const {
    std::vector<bool> used(static_cast<size_t>(parameter_count), false);
    for (const auto& g : gates) {
      int nt = g.two_qubit() ? 2 : 1;
      for (int t = 0; t < nt; ++t)
        if (g.targets[static_cast<size_t>(t)] < 1 || g.targets[static_cast<size_t>(t)] > qubit_count)
          throw std::invalid_argument("Circuit: gate target out of range");
      if (g.two_qubit() && g.targets[0] == g.targets[1])
        throw std::invalid_argument("Circuit: two-qubit gate needs distinct targets");
      if (g.kind == GateKind::H || g.kind == GateKind::CNOT) {
        if (g.slot >= 0) throw std::invalid_argument("Circuit: H/CNOT take no parameter");
      } else if (g.slot >= 0) {
        if (g.slot >= parameter_count) throw std::invalid_argument("Circuit: slot index out of range");
        used[static_cast<size_t>(g.slot)] = true;
      }
    }
    for (int s = 0; s < parameter_count; ++s)
      if (!used[static_cast<size_t>(s)])
        throw std::invalid_argument("Circuit: unused parameter slot " + std::to_string(s));
  }
};

namespace detail {

inline void left_mul_1q(ComplexMatrix& m, int n, int q, const Complex& g00, const Complex& g01,
                        const Complex& g10, const Complex& g11) {
  const Index mask = Index{1} << (n - q);
  const Index dim = m.rows();
  for (Index i = 0; i < dim; ++i) {
    if (i & mask) continue;
    Index j = i | mask;
    for (Index c = 0; c < m.cols(); ++c) {
      Complex a = m(i, c), b = m(j, c);
      m(i, c) = g00 * a + g01 * b;
      m(j, c) = g10 * a + g11 * b;
    }
  }
}

inline void left_mul_phase_1q(ComplexMatrix& m, int n, int q, const Complex& p0, const Complex& p1) {
  const Index mask = Index{1} << (n - q);
  for (Index i = 0; i < m.rows(); ++i) m.row(i) *= (i & mask) ? p1 : p0;
}

inline void left_mul_cnot(ComplexMatrix& m, int n, int control, int target) {
  const Index cmask = Index{1} << (n - control);
  const Index tmask = Index{1} << (n - target);
  for (Index i = 0; i < m.rows(); ++i)
    if ((i & cmask) && !(i & tmask)) m.row(i).swap(m.row(i | tmask));
}

inline void left_mul_rzz(ComplexMatrix& m, int n, int a, int b, double angle) {
  const Index amask = Index{1} << (n - a);
  const Index bmask = Index{1} << (n - b);
  const Complex even = std::exp(Complex(0, -angle / 2.0));
  const Complex odd = std::exp(Complex(0, angle / 2.0));
  for (Index i = 0; i < m.rows(); ++i)
    m.row(i) *= (((i & amask) != 0) != ((i & bmask) != 0)) ? odd : even;
}

}  // namespace detail

/// Left-multiplies the circuit's unitary onto m (first gate acts first), so
/// circuit_apply(c, theta, V) = U(theta) * V without forming U.
inline ComplexMatrix circuit_apply(const Circuit& c, std::span<const double> theta,
                                   ComplexMatrix m) {
  if (static_cast<int>(theta.size()) != c.parameter_count)
    throw std::invalid_argument("circuit_apply: wrong parameter count");
  if (m.rows() != (Index{1} << c.qubit_count))
    throw std::invalid_argument("circuit_apply: operand dimension mismatch");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& g : c.gates) {
    double angle = g.slot >= 0 ? theta[static_cast<size_t>(g.slot)] : g.fixed_angle;
    switch (g.kind) {
      case GateKind::H:
        detail::left_mul_1q(m, c.qubit_count, g.targets[0], inv_sqrt2, inv_sqrt2, inv_sqrt2,
                            -inv_sqrt2);
        break;
      case GateKind::CNOT:
        detail::left_mul_cnot(m, c.qubit_count, g.targets[0], g.targets[1]);
        break;
      case GateKind::RX: {
        Complex cc = std::cos(angle / 2.0);
        Complex ss = Complex(0, -std::sin(angle / 2.0));
        detail::left_mul_1q(m, c.qubit_count, g.targets[0], cc, ss, ss, cc);
        break;
      }
      case GateKind::RZ:
        detail::left_mul_phase_1q(m, c.qubit_count, g.targets[0], std::exp(Complex(0, -angle / 2.0)),
                                  std::exp(Complex(0, angle / 2.0)));
        break;
      case GateKind::RZZ:
        detail::left_mul_rzz(m, c.qubit_count, g.targets[0], g.targets[1], angle);
        break;
    }
  }
  return m;
}

/// Product of the gate matrices in sequence order.
inline ComplexMatrix circuit_unitary(const Circuit& c, std::span<const double> theta) {
  Index dim = Index{1} << c.qubit_count;
  return circuit_apply(c, theta, ComplexMatrix::Identity(dim, dim));
}

// ---------------------------------------------------------------------------
// Variational circuit builders

/// Reduced word for the strand-reversal permutation of S_{2n} in the
/// canonical bubble-sort ("staircase") form: (s1)(s2 s1)...(s_{2n-1}...s1).
/// Its length is the crossing count n(2n-1).
inline std::vector<int> mu_reduced_word(int n) {
  std::vector<int> word;
  word.reserve(static_cast<size_t>(n * (2 * n - 1)));
  for (int i = 1; i <= 2 * n - 1; ++i)
    for (int j = i; j >= 1; --j) word.push_back(j);
  return word;
}

/// Encoder-side ansatz: an R_Z layer, the crossing block of the universal
/// strand pattern (adjacent crossing at strand position 2i-1 -> R_X on qubit
/// i, at position 2i -> R_ZZ on qubits i,i+1; one fresh slot per crossing),
/// and a final R_Z layer. Parameter count: n(2n-1) + 2n.
inline Circuit build_U_E(int n) {
  if (n < 2) throw std::invalid_argument("build_U_E: needs at least 2 qubits");
  Circuit c;
  c.qubit_count = n;
  int slot = 0;
  for (int q = 1; q <= n; ++q) c.gates.push_back(Gate::rz(q, slot++));
  for (int pos : mu_reduced_word(n)) {
    if (pos % 2 == 1)
      c.gates.push_back(Gate::rx((pos + 1) / 2, slot++));
    else
      c.gates.push_back(Gate::rzz(pos / 2, pos / 2 + 1, slot++));
  }
  for (int q = 1; q <= n; ++q) c.gates.push_back(Gate::rz(q, slot++));
  c.parameter_count = slot;
  c.validate();
  return c;
}

/// Recovery-side ansatz on m qubits: an R_Z layer, L blocks of
/// (R_X layer, R_Z layer, R_ZZ on all pairs in lexicographic order), then a
/// final R_X layer and R_Z layer. Parameter count: 3m + L(2m + m(m-1)/2).
inline Circuit build_U_R(int m, int blocks) {
  if (m < 1) throw std::invalid_argument("build_U_R: needs at least 1 qubit");
  if (blocks < 0) throw std::invalid_argument("build_U_R: negative block count");
  Circuit c;
  c.qubit_count = m;
  int slot = 0;
  for (int q = 1; q <= m; ++q) c.gates.push_back(Gate::rz(q, slot++));
  for (int l = 0; l < blocks; ++l) {
    for (int q = 1; q <= m; ++q) c.gates.push_back(Gate::rx(q, slot++));
    for (int q = 1; q <= m; ++q) c.gates.push_back(Gate::rz(q, slot++));
    for (int a = 1; a <= m; ++a)
      for (int b = a + 1; b <= m; ++b) c.gates.push_back(Gate::rzz(a, b, slot++));
  }
  for (int q = 1; q <= m; ++q) c.gates.push_back(Gate::rx(q, slot++));
  for (int q = 1; q <= m; ++q) c.gates.push_back(Gate::rz(q, slot++));
  c.parameter_count = slot;
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Assembly of the trainable encode / recover maps

/// E' = U_E(alpha) ∘ E_c as an isometry.
inline Encoder vgqec_encoder(const Encoder& e_c, const Circuit& u_e,
                             std::span<const double> alpha) {
  if (u_e.qubit_count != e_c.n)
    throw std::invalid_argument("vgqec_encoder: circuit/encoder qubit count mismatch");
  Encoder out{circuit_apply(u_e, alpha, e_c.isometry), e_c.n, e_c.k, e_c.label + "+UE"};
  return out;
}

/// R' = R_orig ∘ Tr_anc ∘ U_R(beta) ∘ (append |0><0| ancillas), with the 2k
/// ancillas as the least-significant factors. At beta = 0 this is R_orig.
inline KrausChannel vgqec_recovery(const Circuit& u_r, std::span<const double> beta,
                                   const KrausChannel& r_orig) {
  int n = qubit_count_of_dim(r_orig.din);
  int k = qubit_count_of_dim(r_orig.dout);
  if (u_r.qubit_count != n + 2 * k)
    throw std::invalid_argument("vgqec_recovery: circuit must act on n+2k qubits");
  const Index anc = Index{1} << (2 * k);
  const Index dim_sys = r_orig.din;
  ComplexMatrix m0 = ComplexMatrix::Zero(dim_sys * anc, dim_sys);
  for (Index i = 0; i < dim_sys; ++i) m0(i * anc, i) = 1.0;
  ComplexMatrix w = circuit_apply(u_r, beta, std::move(m0));
  std::vector<ComplexMatrix> ops;
  ops.reserve(static_cast<size_t>(anc) * r_orig.kraus_ops.size());
  for (Index a = 0; a < anc; ++a) {
    ComplexMatrix block(dim_sys, dim_sys);
    for (Index i = 0; i < dim_sys; ++i) block.row(i) = w.row(i * anc + a);
    for (const auto& r : r_orig.kraus_ops) ops.push_back(r * block);
  }
  return KrausChannel{std::move(ops), dim_sys, r_orig.dout};
}

}  // namespace vgqec
