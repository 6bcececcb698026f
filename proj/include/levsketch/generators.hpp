#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "levsketch/matrix.hpp"

namespace levsketch {

// Seeded test-matrix families. All are pure functions of their arguments.

/// i.i.d. N(0, 1) entries.
DenseMatrix gaussian_matrix(std::size_t n, std::size_t d, std::uint64_t seed);

/// First d columns of the normalized n x n Hadamard matrix (n a power of
/// two). Orthonormal columns, so every leverage score is exactly d / n.
DenseMatrix hadamard_columns(std::size_t n, std::size_t d);

/// Gaussian matrix whose first `spikes` rows (at seeded positions) are
/// multiplied by `scale`, giving a few rows with leverage near one.
DenseMatrix spiked_matrix(std::size_t n, std::size_t d, std::uint64_t seed,
                          std::size_t spikes = 4, double scale = 100.0);

/// Gaussian matrix with row j overwritten by row i and both scaled by
/// `scale`, so (i, j) has the largest cross-leverage score.
DenseMatrix planted_pair_matrix(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t i,
                                std::size_t j, double scale = 10.0);

/// Dispatch by family name: gaussian, hadamard, spiked.
DenseMatrix generate_matrix(std::string_view family, std::size_t n, std::size_t d,
                            std::uint64_t seed);

}  // namespace levsketch
