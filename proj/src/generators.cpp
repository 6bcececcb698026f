#include "levsketch/generators.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "levsketch/error.hpp"
#include "levsketch/philox.hpp"
#include "levsketch/sketch.hpp"

namespace levsketch {

namespace {
constexpr std::uint64_t kGaussStream = 0x4d41544eull;  // "MATN"
constexpr std::uint64_t kSpikeStream = 0x5350494bull;  // "SPIK"
}  // namespace

DenseMatrix gaussian_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  const RandomStream rng(seed, kGaussStream);
  DenseMatrix a(n, d);
  auto data = a.data();
  for (std::size_t e = 0; e < data.size(); ++e) data[e] = rng.normal(e);
  return a;
}

DenseMatrix hadamard_columns(std::size_t n, std::size_t d) {
  require(is_power_of_two(n), ErrorCode::NotPowerOfTwo,
          "hadamard_columns needs a power-of-two row count, got " + std::to_string(n));
  require(d >= 1 && d <= n, ErrorCode::InvalidParameter, "need 1 <= d <= n");
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  DenseMatrix a(n, d);
  // H(i, j) = (-1)^popcount(i & j) in Sylvester ordering.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = (std::popcount(i & j) & 1) ? -s : s;
  return a;
}

DenseMatrix spiked_matrix(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t spikes,
                          double scale) {
  require(spikes <= n, ErrorCode::InvalidParameter, "more spikes than rows");
  DenseMatrix a = gaussian_matrix(n, d, seed);
  const RandomStream rng(seed, kSpikeStream);
  std::vector<bool> hit(n, false);
  std::uint64_t pos = 0;
  for (std::size_t s = 0; s < spikes;) {
    const auto i = static_cast<std::size_t>(rng.below(n, pos));
    if (hit[i]) continue;
    hit[i] = true;
    for (double& v : a.row(i)) v *= scale;
    ++s;
  }
  return a;
}

DenseMatrix planted_pair_matrix(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t i,
                                std::size_t j, double scale) {
  require(i < n && j < n && i != j, ErrorCode::InvalidParameter, "bad planted pair indices");
  DenseMatrix a = gaussian_matrix(n, d, seed);
  for (std::size_t c = 0; c < d; ++c) {
    a(i, c) *= scale;
    a(j, c) = a(i, c);
  }
  return a;
}

DenseMatrix generate_matrix(std::string_view family, std::size_t n, std::size_t d,
                            std::uint64_t seed) {
  if (family == "gaussian") return gaussian_matrix(n, d, seed);
  if (family == "hadamard") return hadamard_columns(n, d);
  if (family == "spiked") return spiked_matrix(n, d, seed);
  raise(ErrorCode::InvalidParameter, "unknown matrix family '" + std::string(family) + "'");
}

}  // namespace levsketch
