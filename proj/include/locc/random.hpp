#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "locc/spectra.hpp"
#include "locc/tensor_core.hpp"
#include "locc/types.hpp"

namespace locc {

using Rng = std::mt19937_64;

/// Matrix with iid standard complex Gaussian entries.
ComplexMatrix random_gaussian(Rng& rng, int rows, int cols);

/// Haar-ish random unitary via QR of a Gaussian matrix.
ComplexMatrix random_unitary(Rng& rng, int dim);

/// Random density matrix G G^dag / Tr(G G^dag).
ComplexMatrix random_density(Rng& rng, int dim);

/// Random Hermitian matrix (G + G^dag) / 2, entries O(1).
ComplexMatrix random_hermitian(Rng& rng, int dim);

/// First q columns of a random unitary: a random orthonormal q-set.
ComplexMatrix random_q_basis(Rng& rng, int dim, int q);

/// Random complete measurement set: draws m Gaussian operators g_j and
/// right-multiplies by (sum g^dag g)^(-1/2) so that sum f^dag f = id.
std::vector<ComplexMatrix> random_measurement_ops(Rng& rng, int dim, int m);

/// Random point of the probability simplex, sorted descending.
Spectrum random_state_spectrum(Rng& rng, int len);

}  // namespace locc
