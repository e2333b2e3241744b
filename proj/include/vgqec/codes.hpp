// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "vgqec/channels.hpp"
#include "vgqec/qcore.hpp"

namespace vgqec {

/// Isometry from k logical to n physical qubits: V^dag V = I_{2^k}.
struct Encoder {
  ComplexMatrix isometry;  // 2^n x 2^k
  int n = 0;
  int k = 0;
  std::string label;

  Index dim_in() const { return Index{1} << k; }
  Index dim_out() const { return Index{1} << n; }

  ComplexMatrix encode_state(const ComplexVector& psi) const { return isometry * psi; }

  ComplexMatrix encode(const ComplexMatrix& rho) const {
    return isometry * rho * isometry.adjoint();
  }

  void check_isometry(double tol = 1e-10) const {
    double defect =
        max_abs_diff(isometry.adjoint() * isometry, ComplexMatrix::Identity(dim_in(), dim_in()));
    if (defect > tol)
      throw std::invalid_argument("Encoder '" + label + "': V^dag V deviates from identity by " +
                                  std::to_string(defect));
  }
};

inline KrausChannel encoder_channel(const Encoder& e) {
  return KrausChannel{{e.isometry}, e.dim_in(), e.dim_out()};
}

/// P = V V^dag, the rank-2^k projector onto the code space.
inline ComplexMatrix code_projector(const Encoder& e) {
  return e.isometry * e.isometry.adjoint();
}

// ---------------------------------------------------------------------------
// Fixed and parameterized code families

/// Repetition code on n in {3,5} qubits. Z basis: |b> -> |b...b>;
/// X basis: |0> -> |+...+>, |1> -> |-...->.
inline Encoder repetition_encoder(int n, char basis) {
  if (n != 3 && n != 5) throw std::invalid_argument("repetition_encoder: n must be 3 or 5");
  if (basis != 'Z' && basis != 'X') throw std::invalid_argument("repetition_encoder: basis must be 'Z' or 'X'");
  Index dim = Index{1} << n;
  ComplexMatrix v = ComplexMatrix::Zero(dim, 2);
  v(0, 0) = 1.0;
  v(dim - 1, 1) = 1.0;
  if (basis == 'X') {
    ComplexMatrix h = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) h = tensor(h, hadamard());
    v = h * v;
  }
  return Encoder{std::move(v), n, 1, std::string("rep") + std::to_string(n) + basis};
}

namespace detail {

/// Diagonal phases of R_ZZ(angle) on qubit pair (a, b), 1-based, n qubits:
/// exp(-i angle/2) on even parity of the two bits, exp(+i angle/2) on odd.
inline ComplexVector rzz_diagonal(double angle, int a, int b, int n) {
  Index dim = Index{1} << n;
  ComplexVector d(dim);
  Complex even = std::exp(Complex(0, -angle / 2.0));
  Complex odd = std::exp(Complex(0, angle / 2.0));
  for (Index i = 0; i < dim; ++i) {
    int ba = static_cast<int>((i >> (n - a)) & 1);
    int bb = static_cast<int>((i >> (n - b)) & 1);
    d(i) = (ba ^ bb) ? odd : even;
  }
  return d;
}

}  // namespace detail

/// The five-qubit family with adjustable crossing angles. Circuit: logical
/// qubit on wire 1, CNOT fan-out to wires 2..5, H on every wire, then the
/// R_ZZ ring (1,5),(1,2),(2,3),(3,4),(4,5) with angles a5,a1,a2,a3,a4.
/// alpha = 0 gives the X-basis repetition code; alpha = -pi/2 on every
/// crossing gives the [[5,1,3]] code.
inline Encoder vgqec_k5_encoder(const std::array<double, 5>& alpha) {
  ComplexMatrix v = ComplexMatrix::Zero(32, 2);
  v(0, 0) = 1.0;   // CNOT fan-out of |0>
  v(31, 1) = 1.0;  // CNOT fan-out of |1>
  ComplexMatrix h = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < 5; ++q) h = tensor(h, hadamard());
  v = h * v;
  ComplexVector ring = detail::rzz_diagonal(alpha[4], 1, 5, 5)
                           .cwiseProduct(detail::rzz_diagonal(alpha[0], 1, 2, 5))
                           .cwiseProduct(detail::rzz_diagonal(alpha[1], 2, 3, 5))
                           .cwiseProduct(detail::rzz_diagonal(alpha[2], 3, 4, 5))
                           .cwiseProduct(detail::rzz_diagonal(alpha[3], 4, 5, 5));
  v = ring.asDiagonal() * v;
  return Encoder{std::move(v), 5, 1, "vgqec_k5"};
}

/// The [[5,1,3]] encoder: the k5 circuit with every ring angle at -pi/2.
inline Encoder five_one_three_encoder() {
  Encoder e = vgqec_k5_encoder({-kPi / 2, -kPi / 2, -kPi / 2, -kPi / 2, -kPi / 2});
  e.label = "fiveonethree";
  return e;
}

/// Three-qubit code tailored to amplitude damping:
///   |0>_L = (|000> + i|110>)/sqrt(2),  |1>_L = (i|001> + |111>)/sqrt(2).
inline Encoder discovered_three_qubit_encoder() {
  ComplexMatrix v = ComplexMatrix::Zero(8, 2);
  double s = 1.0 / std::sqrt(2.0);
  v(0, 0) = s;
  v(6, 0) = Complex(0, s);
  v(1, 1) = Complex(0, s);
  v(7, 1) = s;
  return Encoder{std::move(v), 3, 1, "discovered3"};
}

// ---------------------------------------------------------------------------
// Stabilizer helpers for the [[5,1,3]] code

/// Generators X2 Z3 Z4 X5, X1 X3 Z4 Z5, Z1 X2 X4 Z5, Z1 Z2 X3 X5.
inline std::vector<ComplexMatrix> five13_stabilizer_generators() {
  return {pauli_string("IXZZX", 5), pauli_string("XIXZZ", 5), pauli_string("ZXIXZ", 5),
          pauli_string("ZZXIX", 5)};
}

/// Projector onto the joint eigenspace with eigenvalue signs[g] per generator.
inline ComplexMatrix stabilizer_projector(const std::vector<ComplexMatrix>& generators,
                                          const std::vector<int>& signs) {
  if (generators.empty() || generators.size() != signs.size())
    throw std::invalid_argument("stabilizer_projector: generator/sign count mismatch");
  Index dim = generators.front().rows();
  ComplexMatrix p = ComplexMatrix::Identity(dim, dim);
  for (size_t g = 0; g < generators.size(); ++g)
    p = p * (ComplexMatrix::Identity(dim, dim) + static_cast<double>(signs[g]) * generators[g]) / 2.0;
  return p;
}

/// All 3n single-qubit Paulis on n qubits, ordered X1,Y1,Z1,X2,...
inline std::vector<ComplexMatrix> weight_one_paulis(int n) {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<size_t>(3 * n));
  for (int q = 0; q < n; ++q)
    for (char c : {'X', 'Y', 'Z'}) {
      std::string spec(static_cast<size_t>(n), 'I');
      spec[static_cast<size_t>(q)] = c;
      out.push_back(pauli_string(spec, n));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Knill-Laflamme check

/// lambda is trace-normalized over the error set; residual is
/// max_ij || P E_i^dag E_j P - lambda_raw_ij P ||_F with
/// lambda_raw_ij = Tr(P E_i^dag E_j P)/Tr(P). residual ~ 0 certifies exact
/// correctability of the error set on the code space.
struct KLReport {
  ComplexMatrix lambda;
  double residual = 0.0;
};

inline KLReport kl_check(const ComplexMatrix& p, const std::vector<ComplexMatrix>& errors,
                         double tol = 1e-10) {
  if (errors.empty()) throw std::invalid_argument("kl_check: empty error set");
  if (max_abs_diff(p * p, p) > tol)
    throw std::invalid_argument("kl_check: input is not a projector within tolerance");
  const Index m = static_cast<Index>(errors.size());
  const double tr_p = p.trace().real();
  ComplexMatrix raw(m, m);
  double residual = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      ComplexMatrix pep = p * errors[static_cast<size_t>(i)].adjoint() *
                          errors[static_cast<size_t>(j)] * p;
      raw(i, j) = pep.trace() / tr_p;
      residual = std::max(residual, (pep - raw(i, j) * p).norm());
    }
  Complex tr_raw = raw.trace();
  ComplexMatrix lambda = std::abs(tr_raw) > 1e-300 ? ComplexMatrix(raw / tr_raw) : raw;
  return KLReport{std::move(lambda), residual};
}

// ---------------------------------------------------------------------------
// Syndrome decoders

/// Builds the recovery channel of a code from its correction table: project
/// onto the syndrome space C_s P C_s^dag, undo C_s, decode with V^dag. The
/// corrections must tile the physical space (sum of syndrome projectors = I).
inline KrausChannel syndrome_decoder(const Encoder& e,
                                     const std::vector<ComplexMatrix>& corrections,
                                     double tol = 1e-9) {
  ComplexMatrix p = code_projector(e);
  Index dim = e.dim_out();
  ComplexMatrix tile = ComplexMatrix::Zero(dim, dim);
  std::vector<ComplexMatrix> ops;
  ops.reserve(corrections.size());
  for (const auto& c : corrections) {
    tile.noalias() += c * p * c.adjoint();
    // V^dag C^dag Pi_s collapses to V^dag C^dag since Pi_s = C P C^dag.
    ops.push_back(e.isometry.adjoint() * c.adjoint());
  }
  if (max_abs_diff(tile, ComplexMatrix::Identity(dim, dim)) > tol)
    throw std::invalid_argument(
        "syndrome_decoder: corrections do not tile the physical space for code '" + e.label + "'");
  return KrausChannel{std::move(ops), dim, e.dim_in()};
}

/// Decoders for the named codes: majority-vote corrections for the
/// repetition codes, the 15 weight-1 Paulis for the [[5,1,3]] code.
inline KrausChannel standard_decoder(const std::string& label) {
  if (label == "rep3Z") {
    std::vector<ComplexMatrix> corrections = {pauli_string("III", 3), pauli_string("XII", 3),
                                              pauli_string("IXI", 3), pauli_string("IIX", 3)};
    return syndrome_decoder(repetition_encoder(3, 'Z'), corrections);
  }
  if (label == "rep5X") {
    // Phase flips move |+>/|-> populations; all Z patterns of weight <= 2.
    std::vector<ComplexMatrix> corrections;
    corrections.push_back(pauli_string("IIIII", 5));
    for (int a = 0; a < 5; ++a) {
      std::string s(5, 'I');
      s[static_cast<size_t>(a)] = 'Z';
      corrections.push_back(pauli_string(s, 5));
    }
    for (int a = 0; a < 5; ++a)
      for (int b = a + 1; b < 5; ++b) {
        std::string s(5, 'I');
        s[static_cast<size_t>(a)] = 'Z';
        s[static_cast<size_t>(b)] = 'Z';
        corrections.push_back(pauli_string(s, 5));
      }
    return syndrome_decoder(repetition_encoder(5, 'X'), corrections);
  }
  if (label == "fiveonethree") {
    std::vector<ComplexMatrix> corrections = {ComplexMatrix::Identity(32, 32)};
    for (auto& w : weight_one_paulis(5)) corrections.push_back(std::move(w));
    return syndrome_decoder(five_one_three_encoder(), corrections);
  }
  throw std::invalid_argument("standard_decoder: unknown code label '" + label + "'");
}

}  // namespace vgqec
