// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace vgqec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// A normalized state vector on a 2^n-dimensional space.
struct PureState {
  ComplexVector amplitudes;

  Index dimension() const { return amplitudes.size(); }

  static PureState from_amplitudes(ComplexVector amps, double tol = 1e-12) {
    double n2 = amps.squaredNorm();
    if (std::abs(n2 - 1.0) > tol)
      throw std::invalid_argument("PureState: squared norm deviates from 1 by " +
                                  std::to_string(std::abs(n2 - 1.0)));
    return PureState{std::move(amps)};
  }

  /// Computational basis state |b> on dim dimensions.
  static PureState basis(Index b, Index dim) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(b) = 1.0;
    return PureState{std::move(v)};
  }
};

/// A unit-trace Hermitian PSD operator.
struct DensityMatrix {
  ComplexMatrix matrix;

  Index dimension() const { return matrix.rows(); }

  /// Verifies Hermiticity, unit trace and spectrum; throws on violation.
  void validate(double tol = 1e-12, double eig_tol = 1e-10) const;

  static DensityMatrix from_matrix(ComplexMatrix m) {
    DensityMatrix rho{std::move(m)};
    rho.validate();
    return rho;
  }

  static DensityMatrix from_pure(const PureState& psi) {
    return DensityMatrix{psi.amplitudes * psi.amplitudes.adjoint()};
  }

  static DensityMatrix maximally_mixed(Index dim) {
    return DensityMatrix{ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim)};
  }
};

inline bool is_power_of_two(Index d) { return d > 0 && (d & (d - 1)) == 0; }

inline int qubit_count_of_dim(Index d) {
  if (!is_power_of_two(d)) throw std::invalid_argument("dimension is not a power of 2");
  int n = 0;
  while ((Index{1} << n) < d) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Tensor algebra

/// Kronecker product; dimensions multiply.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Reduces a square operator to the subsystems listed in `keep` (0-based
/// positions into `subsystem_dims`, which is ordered most-significant first).
/// The trace is preserved.
inline ComplexMatrix partial_trace(const ComplexMatrix& m,
                                   const std::vector<Index>& subsystem_dims,
                                   const std::vector<Index>& keep) {
  Index total = 1;
  for (Index d : subsystem_dims) total *= d;
  if (m.rows() != m.cols() || m.rows() != total)
    throw std::invalid_argument("partial_trace: dimension mismatch");

  const size_t ns = subsystem_dims.size();
  std::vector<bool> kept(ns, false);
  for (Index k : keep) {
    if (k < 0 || static_cast<size_t>(k) >= ns)
      throw std::invalid_argument("partial_trace: keep index out of range");
    kept[static_cast<size_t>(k)] = true;
  }

  Index dim_keep = 1, dim_tr = 1;
  for (size_t s = 0; s < ns; ++s) (kept[s] ? dim_keep : dim_tr) *= subsystem_dims[s];

  // Strides of each subsystem in the full index (MSB-first layout).
  std::vector<Index> stride(ns, 1);
  for (size_t s = ns; s-- > 1;) stride[s - 1] = stride[s] * subsystem_dims[s];

  auto compose_index = [&](Index ik, Index it) {
    Index idx = 0, rk = ik, rt = it;
    // Walk subsystems least-significant first so divmod peels digits off.
    for (size_t s = ns; s-- > 0;) {
      Index d = subsystem_dims[s];
      Index digit;
      if (kept[s]) {
        digit = rk % d;
        rk /= d;
      } else {
        digit = rt % d;
        rt /= d;
      }
      idx += digit * stride[s];
    }
    return idx;
  };

  ComplexMatrix out = ComplexMatrix::Zero(dim_keep, dim_keep);
  for (Index i = 0; i < dim_keep; ++i)
    for (Index j = 0; j < dim_keep; ++j) {
      Complex acc = 0.0;
      for (Index t = 0; t < dim_tr; ++t) acc += m(compose_index(i, t), compose_index(j, t));
      out(i, j) = acc;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition

struct HermitianEig {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns, orthonormal
};

/// Eigendecomposition of a Hermitian matrix. The contract is the
/// reconstruction residual: m = V diag(w) V^dag within 1e-10.
inline HermitianEig hermitian_eig(const ComplexMatrix& m, double herm_tol = 1e-10) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eig: matrix not square");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
    throw std::invalid_argument("hermitian_eig: input not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
  return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
inline ComplexMatrix project_psd(const ComplexMatrix& m) {
  HermitianEig eig = hermitian_eig((m + m.adjoint()) / 2.0, 1e-6);
  RealVector w = eig.eigenvalues.cwiseMax(0.0);
  return eig.eigenvectors * w.asDiagonal() * eig.eigenvectors.adjoint();
}

// ---------------------------------------------------------------------------
// Pauli operators

inline const ComplexMatrix& pauli_i() {
  static const ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  return m;
}
inline const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m = (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished();
  return m;
}
inline const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m =
      (ComplexMatrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  return m;
}
inline const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m = (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished();
  return m;
}
inline const ComplexMatrix& hadamard() {
  static const ComplexMatrix m =
      (ComplexMatrix(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
  return m;
}

/// Tensor product of single-qubit Paulis in qubit order (qubit 1 is the
/// most-significant factor). spec must have length n, letters from {I,X,Y,Z}.
inline ComplexMatrix pauli_string(std::string_view spec, int n) {
  if (static_cast<int>(spec.size()) != n)
    throw std::invalid_argument("pauli_string: spec length != qubit count");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (char c : spec) {
    switch (c) {
      case 'I': out = tensor(out, pauli_i()); break;
      case 'X': out = tensor(out, pauli_x()); break;
      case 'Y': out = tensor(out, pauli_y()); break;
      case 'Z': out = tensor(out, pauli_z()); break;
      default:
        throw std::invalid_argument(std::string("pauli_string: invalid letter '") + c + "'");
    }
  }
  return out;
}

inline void DensityMatrix::validate(double tol, double eig_tol) const {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("DensityMatrix: matrix not square");
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
  if (std::abs(matrix.trace() - Complex(1.0)) > tol)
    throw std::invalid_argument("DensityMatrix: trace deviates from 1");
  HermitianEig eig = hermitian_eig(matrix, tol * 10);
  if (eig.eigenvalues.minCoeff() < -eig_tol)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
}

// ---------------------------------------------------------------------------
// Small comparison helpers shared across modules

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

/// Frobenius distance minimized over a global phase on `a`.
inline double phase_insensitive_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  Complex ov = (a.adjoint() * b).trace();
  Complex phase = std::abs(ov) > 1e-300 ? ov / std::abs(ov) : Complex(1.0);
  return (a * phase - b).norm();
}

}  // namespace vgqec
