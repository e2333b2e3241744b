// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#include <catch_amalgamated.hpp>

#include "test_util.hpp"
#include "vgqec/channels.hpp"

using namespace vgqec;

namespace {

DensityMatrix ket_density(int b) {
  ComplexVector v = ComplexVector::Zero(2);
  v(b) = 1.0;
  return DensityMatrix{v * v.adjoint()};
}

}  // namespace

TEST_CASE("apply: identity channel and amplitude damping populations", "[channels]") {
  Rng rng(21);
  DensityMatrix rho = test::random_density(4, rng);
  REQUIRE(max_abs_diff(apply(identity_channel(4), rho).matrix, rho.matrix) < 1e-14);

  double gamma = 0.37;
  DensityMatrix out = apply(amplitude_damping(gamma), ket_density(1));
  REQUIRE(out.matrix(0, 0).real() == Catch::Approx(gamma));
  REQUIRE(out.matrix(1, 1).real() == Catch::Approx(1.0 - gamma));
  out.validate();
}

TEST_CASE("thermal relaxation: off-diagonal decays by exp(-t/T2)", "[channels]") {
  double t = 13.0, t1 = 97.51, t2 = 120.0;
  ComplexVector plus(2);
  plus << 1, 1;
  plus /= std::sqrt(2.0);
  DensityMatrix rho{plus * plus.adjoint()};
  DensityMatrix out = apply(thermal_relaxation(t, t1, t2), rho);
  REQUIRE(std::abs(out.matrix(0, 1) - Complex(0.5 * std::exp(-t / t2))) < 1e-12);
}

TEST_CASE("thermal relaxation: reproduces the density-matrix map table", "[channels]") {
  Rng rng(22);
  for (int rep = 0; rep < 100; ++rep) {
    double t1 = rng.uniform(10.0, 150.0);
    double t2 = rng.uniform(0.2, 2.0) * t1;  // keep T2 <= 2 T1
    double t = rng.uniform(0.0, 30.0);
    DensityMatrix rho = test::random_density(2, rng);
    DensityMatrix out = apply(thermal_relaxation(t, t1, t2), rho);
    double p11 = rho.matrix(1, 1).real();
    Complex p01 = rho.matrix(0, 1);
    REQUIRE(std::abs(out.matrix(1, 1).real() - p11 * std::exp(-t / t1)) < 1e-10);
    REQUIRE(std::abs(out.matrix(0, 0).real() - (1.0 - p11 * std::exp(-t / t1))) < 1e-10);
    double tphi_rate = 1.0 / t2 - 1.0 / (2.0 * t1);
    Complex decay = std::exp(-t / (2.0 * t1) - t * tphi_rate);
    REQUIRE(std::abs(out.matrix(0, 1) - p01 * decay) < 1e-10);
    REQUIRE(std::abs(out.matrix(1, 0) - std::conj(p01) * decay) < 1e-10);
  }
}

TEST_CASE("thermal relaxation: limits and validation", "[channels]") {
  REQUIRE(max_abs_diff(thermal_relaxation(0.0, 50.0, 70.0).apply_matrix(pauli_x()), pauli_x()) <
          1e-12);
  DensityMatrix late = apply(thermal_relaxation(1e6, 50.0, 70.0), ket_density(1));
  REQUIRE(late.matrix(0, 0).real() == Catch::Approx(1.0));
  REQUIRE_THROWS_AS(thermal_relaxation(1.0, 50.0, 101.0), std::invalid_argument);
  REQUIRE_THROWS_AS(thermal_relaxation(-1.0, 50.0, 70.0), std::invalid_argument);
}

TEST_CASE("compose: identity and sequential-apply oracle", "[channels]") {
  KrausChannel id2 = identity_channel(2);
  REQUIRE(max_abs_diff(compose(id2, id2).kraus_ops[0], ComplexMatrix::Identity(2, 2)) == 0.0);

  double g1 = 0.2, g2 = 0.35;
  KrausChannel ad12 = compose(amplitude_damping(g1), amplitude_damping(g2));
  DensityMatrix out = apply(ad12, ket_density(1));
  REQUIRE(out.matrix(1, 1).real() == Catch::Approx((1.0 - g1) * (1.0 - g2)));

  Rng rng(23);
  KrausChannel a = test::random_channel(4, 4, 3, rng);
  KrausChannel b = test::random_channel(4, 4, 2, rng);
  for (int rep = 0; rep < 5; ++rep) {
    DensityMatrix rho = test::random_density(4, rng);
    REQUIRE(max_abs_diff(apply(compose(b, a), rho).matrix, apply(b, apply(a, rho)).matrix) < 1e-12);
  }
  REQUIRE_THROWS_AS(compose(amplitude_damping(0.1), test::random_channel(4, 4, 2, rng)),
                    std::invalid_argument);
}

TEST_CASE("kraus_to_choi / choi_to_kraus", "[channels]") {
  // identity channel <-> scaled maximally entangled projector
  ChoiMatrix id_choi = kraus_to_choi(identity_channel(2));
  ComplexVector omega(4);
  omega << 1, 0, 0, 1;
  REQUIRE(max_abs_diff(id_choi.matrix, ComplexMatrix(omega * omega.adjoint())) < 1e-14);

  // rank of the AD Choi matrix is 2
  ChoiMatrix ad_choi = kraus_to_choi(amplitude_damping(0.3));
  HermitianEig eig = hermitian_eig(ad_choi.matrix);
  int rank = 0;
  for (Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) > 1e-12) ++rank;
  REQUIRE(rank == 2);

  // round trip preserves the action on basis inputs
  KrausChannel back = choi_to_kraus(ad_choi);
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) {
      ComplexMatrix basis = ComplexMatrix::Zero(2, 2);
      basis(m, n) = 1.0;
      REQUIRE(max_abs_diff(back.apply_matrix(basis),
                           amplitude_damping(0.3).apply_matrix(basis)) < 1e-10);
    }

  // non-PSD input rejected
  ChoiMatrix bad{-id_choi.matrix, 2, 2};
  REQUIRE_THROWS_AS(choi_to_kraus(bad), std::invalid_argument);
}

TEST_CASE("channel round trips on random channels preserve action", "[channels]") {
  Rng rng(24);
  for (int rep = 0; rep < 20; ++rep) {
    Index din = 1 + static_cast<Index>(rng.uniform_index(3));
    din = Index{1} << din;  // 2,4,8
    Index dout = rng.uniform_index(2) ? 2 : din;
    KrausChannel ch = test::random_channel(din, dout, 2 + static_cast<Index>(rng.uniform_index(3)), rng);
    KrausChannel back = choi_to_kraus(kraus_to_choi(ch));
    DensityMatrix rho = test::random_density(din, rng);
    REQUIRE(max_abs_diff(back.apply_matrix(rho.matrix), ch.apply_matrix(rho.matrix)) < 1e-10);
  }
}

TEST_CASE("channel_fidelity: closed forms", "[channels]") {
  REQUIRE(channel_fidelity(identity_channel(2)) == Catch::Approx(1.0));
  REQUIRE(channel_fidelity(depolarizing(0.2)) == Catch::Approx(0.85).margin(1e-12));
  double gamma = 0.04;
  REQUIRE(channel_fidelity(amplitude_damping(gamma)) ==
          Catch::Approx(std::pow(1.0 + std::sqrt(1.0 - gamma), 2) / 4.0).margin(1e-12));
  REQUIRE_THROWS_AS(channel_fidelity(KrausChannel{{ComplexMatrix::Identity(2, 4)}, 4, 2}),
                    std::invalid_argument);
}

TEST_CASE("channel_fidelity: invariant under Kraus gauge", "[channels]") {
  Rng rng(25);
  for (int rep = 0; rep < 10; ++rep) {
    KrausChannel ch = test::random_channel(4, 4, 3, rng);
    double f1 = channel_fidelity(ch);
    double f2 = channel_fidelity(choi_to_kraus(kraus_to_choi(ch)));
    REQUIRE(std::abs(f1 - f2) < 1e-10);
  }
}

TEST_CASE("entanglement_fidelity: identities", "[channels]") {
  Rng rng(26);
  KrausChannel ch = test::random_channel(2, 2, 2, rng);
  DensityMatrix rho = test::random_density(2, rng);
  REQUIRE(entanglement_fidelity(rho, identity_channel(2)) == Catch::Approx(1.0));

  // maximally mixed input reproduces channel fidelity
  for (int rep = 0; rep < 100; ++rep) {
    KrausChannel c = test::random_channel(2, 2, 1 + static_cast<Index>(rng.uniform_index(4)), rng);
    REQUIRE(std::abs(entanglement_fidelity(DensityMatrix::maximally_mixed(2), c) -
                     channel_fidelity(c)) < 1e-12);
  }

  // |0> is a fixed point of amplitude damping
  REQUIRE(entanglement_fidelity(ket_density(0), amplitude_damping(0.7)) == Catch::Approx(1.0));

  // pure-state equivalence with the survival probability
  PureState psi = test::random_pure(2, rng);
  DensityMatrix pure = DensityMatrix::from_pure(psi);
  double fe = entanglement_fidelity(pure, ch);
  double survival = (psi.amplitudes.adjoint() * ch.apply_matrix(pure.matrix) * psi.amplitudes)(0).real();
  REQUIRE(fe == Catch::Approx(survival).margin(1e-12));
}

TEST_CASE("amplitude damping limits", "[channels]") {
  REQUIRE(max_abs_diff(amplitude_damping(0.0).apply_matrix(pauli_x()), pauli_x()) < 1e-14);
  Rng rng(27);
  DensityMatrix rho = test::random_density(2, rng);
  DensityMatrix out = apply(amplitude_damping(1.0), rho);
  REQUIRE(out.matrix(0, 0).real() == Catch::Approx(1.0));
  DensityMatrix half = apply(amplitude_damping(0.5), DensityMatrix::maximally_mixed(2));
  REQUIRE(half.matrix(0, 0).real() == Catch::Approx(0.75));
  REQUIRE(half.matrix(1, 1).real() == Catch::Approx(0.25));
  REQUIRE_THROWS_AS(amplitude_damping(1.5), std::invalid_argument);
}

TEST_CASE("interpolated_pauli endpoints and normalization", "[channels]") {
  Rng rng(28);
  DensityMatrix rho = test::random_density(2, rng);
  // eta = 0: pure dephasing 0.95 rho + 0.05 Z rho Z
  ComplexMatrix dephased = 0.95 * rho.matrix + 0.05 * pauli_z() * rho.matrix * pauli_z();
  REQUIRE(max_abs_diff(interpolated_pauli(0.0).apply_matrix(rho.matrix), dephased) < 1e-12);
  // eta = 1: 0.85 rho + 0.05 (X+Y+Z conjugations)
  ComplexMatrix depol = 0.85 * rho.matrix;
  for (const auto& p : {pauli_x(), pauli_y(), pauli_z()}) depol += 0.05 * p * rho.matrix * p;
  REQUIRE(max_abs_diff(interpolated_pauli(1.0).apply_matrix(rho.matrix), depol) < 1e-12);
  for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0})
    REQUIRE(interpolated_pauli(eta).trace_preservation_defect() < 1e-12);
  REQUIRE_THROWS_AS(interpolated_pauli(1.2), std::invalid_argument);
}

TEST_CASE("correlated_xx", "[channels]") {
  REQUIRE(correlated_xx(0.0, 1, 2).kraus_ops[1].norm() == 0.0);
  Rng rng(29);
  DensityMatrix rho = test::random_density(4, rng);
  REQUIRE(max_abs_diff(correlated_xx(1.0, 1, 2).apply_matrix(rho.matrix),
                       ComplexMatrix(tensor(pauli_x(), pauli_x()) * rho.matrix *
                                     tensor(pauli_x(), pauli_x()))) < 1e-12);

  // |00000><00000| gains an |01100> component under the (2,3) pair flip
  ComplexMatrix zero = ComplexMatrix::Zero(32, 32);
  zero(0, 0) = 1.0;
  ComplexMatrix out = correlated_xx(0.05, 2, 5).apply_matrix(zero);
  REQUIRE(out(0, 0).real() == Catch::Approx(0.95));
  REQUIRE(out(0b01100, 0b01100).real() == Catch::Approx(0.05));
  REQUIRE_THROWS_AS(correlated_xx(0.05, 5, 5), std::invalid_argument);
}

TEST_CASE("tensor_channels", "[channels]") {
  KrausChannel id4 = tensor_channels({identity_channel(2), identity_channel(2)});
  REQUIRE(id4.din == 4);
  REQUIRE(max_abs_diff(id4.kraus_ops[0], ComplexMatrix::Identity(4, 4)) == 0.0);

  // AD (x) id acts only on the first qubit
  Rng rng(30);
  DensityMatrix rho = test::random_density(4, rng);
  KrausChannel adx = tensor_channels({amplitude_damping(0.3), identity_channel(2)});
  REQUIRE(max_abs_diff(adx.apply_matrix(rho.matrix),
                       embed_single_qubit(amplitude_damping(0.3), 1, 2).apply_matrix(rho.matrix)) <
          1e-12);

  REQUIRE(tensor_channels({amplitude_damping(0.3), thermal_relaxation(1, 50, 60)}).kraus_ops.size() ==
          6);
  REQUIRE_THROWS_AS(tensor_channels({}), std::invalid_argument);
}

TEST_CASE("interpolation_noise: trace preservation and dephasing commutation", "[channels]") {
  KrausChannel noise = interpolation_noise(0.35);
  REQUIRE(noise.din == 32);
  REQUIRE(noise.trace_preservation_defect() < 1e-10);

  // staged and flattened forms agree
  ChannelSequence stages = interpolation_noise_stages(0.35);
  Rng rng(31);
  DensityMatrix rho = test::random_density(32, rng);
  REQUIRE(max_abs_diff(noise.apply_matrix(rho.matrix), stages.apply_matrix(rho.matrix)) < 1e-10);

  // at eta = 0 the single-qubit factor commutes with Z conjugation
  KrausChannel dephasing = interpolated_pauli(0.0);
  ComplexMatrix lhs = dephasing.apply_matrix(pauli_z() * rho.matrix.block(0, 0, 2, 2) * pauli_z());
  ComplexMatrix rhs = pauli_z() * dephasing.apply_matrix(rho.matrix.block(0, 0, 2, 2)) * pauli_z();
  REQUIRE(max_abs_diff(lhs, rhs) < 1e-12);

  // the full 5-qubit factor at eta = 0 commutes with Z...Z conjugation
  ComplexMatrix zz = pauli_string("ZZZZZ", 5);
  ChannelSequence n1;
  for (int q = 1; q <= 5; ++q) n1.stages.push_back(embed_single_qubit(dephasing, q, 5));
  REQUIRE(max_abs_diff(n1.apply_matrix(zz * rho.matrix * zz),
                       ComplexMatrix(zz * n1.apply_matrix(rho.matrix) * zz)) < 1e-10);
}

TEST_CASE("channel constructors are trace preserving", "[channels]") {
  for (double p : {0.0, 0.13, 0.7, 1.0}) {
    REQUIRE(amplitude_damping(p).trace_preservation_defect() < 1e-10);
    REQUIRE(bit_flip(p).trace_preservation_defect() < 1e-10);
    if (p <= 1.0) REQUIRE(depolarizing(p).trace_preservation_defect() < 1e-10);
  }
  REQUIRE(thermal_relaxation(3.0, 80.0, 100.0).trace_preservation_defect() < 1e-10);
  REQUIRE(correlated_xx(0.4, 2, 3).trace_preservation_defect() < 1e-10);
}
