// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include "vgqec/channels.hpp"
#include "vgqec/qcore.hpp"
#include "vgqec/util.hpp"

namespace vgqec::test {

inline ComplexMatrix random_matrix(Index rows, Index cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal_complex();
  return m;
}

inline ComplexMatrix random_hermitian(Index dim, Rng& rng) {
  ComplexMatrix g = random_matrix(dim, dim, rng);
  return (g + g.adjoint()) / 2.0;
}

inline DensityMatrix random_density(Index dim, Rng& rng) {
  ComplexMatrix g = random_matrix(dim, dim, rng);
  ComplexMatrix rho = g * g.adjoint();
  return DensityMatrix{rho / rho.trace()};
}

inline PureState random_pure(Index dim, Rng& rng) {
  ComplexVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = rng.normal_complex();
  v /= v.norm();
  return PureState{v};
}

/// Random CPTP channel via a Stinespring isometry with `env` environment
/// levels (raised as needed so the isometry exists).
inline KrausChannel random_channel(Index dim_in, Index dim_out, Index env, Rng& rng) {
  env = std::max(env, (dim_in + dim_out - 1) / dim_out);
  ComplexMatrix v = random_isometry(dim_out * env, dim_in, rng);
  std::vector<ComplexMatrix> ops;
  for (Index e = 0; e < env; ++e) {
    ComplexMatrix k(dim_out, dim_in);
    for (Index r = 0; r < dim_out; ++r) k.row(r) = v.row(r * env + e);
    ops.push_back(std::move(k));
  }
  return KrausChannel{std::move(ops), dim_in, dim_out};
}

}  // namespace vgqec::test
