#pragma once

#include <cstdint>
#include <random>

#include "qinst/matrix.hpp"

namespace qinst {

using RandomEngine = std::mt19937_64;

// Stable seed derivation for independent substreams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Matrix with i.i.d. standard complex Gaussian entries.
Matrix ginibre(int rows, int cols, RandomEngine& eng);

// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
Matrix haar_random_unitary(int dim, RandomEngine& eng);

QuantumState random_pure_state(int dim, RandomEngine& eng);

// Full-rank state G G^dag / Tr[G G^dag] with G Ginibre.
QuantumState random_mixed_state(int dim, RandomEngine& eng);

HermitianMatrix random_hermitian(int dim, RandomEngine& eng);

// Rank-1 projective measurement given by the columns of a Haar unitary.
Povm random_projective_povm(int dim, RandomEngine& eng);

// Channel from a Haar-random isometry C^dim -> C^{num_kraus * dim} sliced
// into num_kraus blocks.
Channel random_channel(int dim, int num_kraus, RandomEngine& eng);

}  // namespace qinst
