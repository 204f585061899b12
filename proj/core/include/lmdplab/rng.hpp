#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace lmdplab {

// All randomness flows through mt19937_64 seeded via derive_seed so that runs
// are reproducible bit-for-bit. std::*_distribution adapters are avoided on
// purpose: their algorithms are implementation-defined, which would break the
// byte-identical-rerun contract across standard libraries.
using Rng = std::mt19937_64;

// splitmix64 finalizer; the standard strong 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

// Deterministic seed for a labeled sub-stream, e.g. (master, H, run_index).
// Collision-resistant by mixing each component through splitmix64.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
inline double next_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by scaling; n is tiny (action/state counts), so
// the modulo-free scaling bias is far below 2^-40 and irrelevant here.
inline int next_index(Rng& rng, int n) {
  int i = static_cast<int>(next_unit(rng) * n);
  return i >= n ? n - 1 : i;
}

// Sample an index from an (unnormalized-tolerant) probability row via an
// explicit CDF walk; the last positive entry absorbs rounding slack.
int sample_discrete(std::span<const double> probs, Rng& rng);

}  // namespace lmdplab
