#pragma once

// Bitmask kernels behind every subset operation.
//
// Focal sets are stored structure-of-arrays: `k` masks of `words` 64-bit
// words each, laid out contiguously (mask i occupies words [i*words,
// (i+1)*words)), with a parallel array of `k` masses. A scalar reference and
// an AVX2 variant implement the same table; `active()` picks one at runtime.
//
// Reductions use four interleaved partial sums combined as
// (s0 + s1) + (s2 + s3), with the tail added afterwards in order. Both
// variants follow that schedule, so their results are bitwise identical.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace bf::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;

  // Sum of masses of focal sets contained in `query`.
  double (*belief_sum)(const std::uint64_t* focal, const double* mass, std::size_t k,
                       std::size_t words, const std::uint64_t* query);

  // Sum of masses of focal sets intersecting `query`.
  double (*plausibility_sum)(const std::uint64_t* focal, const double* mass, std::size_t k,
                             std::size_t words, const std::uint64_t* query);

  // out[i] = row & focal[i] for each of the k masks.
  void (*intersect_rows)(const std::uint64_t* row, const std::uint64_t* focal, std::size_t k,
                         std::size_t words, std::uint64_t* out);

  // out[i] = in[i] * factor.
  void (*scale)(const double* in, double factor, std::size_t k, double* out);

  // Bitwise ops over one mask of `words` words.
  void (*bit_and)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words,
                  std::uint64_t* out);
  void (*bit_or)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words,
                 std::uint64_t* out);
  void (*bit_andnot)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words,
                     std::uint64_t* out);  // a & ~b
  std::size_t (*popcount)(const std::uint64_t* a, std::size_t words);
  bool (*is_zero)(const std::uint64_t* a, std::size_t words);
  bool (*is_subset)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
  bool (*intersects)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
};

const KernelTable& scalar_table() noexcept;

// Null when the build has no AVX2 translation unit or the CPU lacks AVX2.
const KernelTable* avx2_table() noexcept;

// Selected once: AVX2 when available, unless BF_SIMD=scalar is set.
const KernelTable& active() noexcept;

// Test hook. Returns false if the requested ISA is unavailable.
bool force_isa(Isa isa) noexcept;

}  // namespace bf::kernels
