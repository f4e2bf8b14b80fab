#include <immintrin.h>

#include <bit>

#include "kernels_internal.hpp"

namespace bf::kernels {
namespace {

inline __m256i load(const std::uint64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

inline void store(std::uint64_t* p, __m256i v) {
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v);
}

bool row_subset(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::size_t w = 0;
  for (; w + 4 <= words; w += 4) {
    const __m256i diff = _mm256_andnot_si256(load(b + w), load(a + w));
    if (!_mm256_testz_si256(diff, diff)) return false;
  }
  for (; w < words; ++w) {
    if ((a[w] & ~b[w]) != 0) return false;
  }
  return true;
}

bool row_intersects(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::size_t w = 0;
  for (; w + 4 <= words; w += 4) {
    if (!_mm256_testz_si256(load(a + w), load(b + w))) return true;
  }
  for (; w < words; ++w) {
    if ((a[w] & b[w]) != 0) return true;
  }
  return false;
}

inline double finish(__m256d lanes) {
  alignas(32) double l[4];
  _mm256_store_pd(l, lanes);
  return (l[0] + l[1]) + (l[2] + l[3]);
}

// Single-word masks: four focal sets per iteration, one per lane.
template <bool Subset>
double masked_sum_1w(const std::uint64_t* focal, const double* mass, std::size_t k,
                     std::uint64_t query) {
  const __m256i q = _mm256_set1_epi64x(static_cast<long long>(query));
  const __m256i zero = _mm256_setzero_si256();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= k; i += 4) {
    const __m256i f = load(focal + i);
    __m256i keep;
    if constexpr (Subset) {
      keep = _mm256_cmpeq_epi64(_mm256_andnot_si256(q, f), zero);
    } else {
      keep = _mm256_xor_si256(_mm256_cmpeq_epi64(_mm256_and_si256(q, f), zero),
                              _mm256_set1_epi64x(-1));
    }
    acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_castsi256_pd(keep), _mm256_loadu_pd(mass + i)));
  }
  double total = finish(acc);
  for (; i < k; ++i) {
    const bool hit = Subset ? (focal[i] & ~query) == 0 : (focal[i] & query) != 0;
    if (hit) total += mass[i];
  }
  return total;
}

template <class Pred>
double masked_sum_nw(const std::uint64_t* focal, const double* mass, std::size_t k,
                     std::size_t words, Pred keep) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= k; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      if (keep(focal + (i + l) * words)) lane[l] += mass[i + l];
    }
  }
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < k; ++i) {
    if (keep(focal + i * words)) total += mass[i];
  }
  return total;
}

double belief_sum(const std::uint64_t* focal, const double* mass, std::size_t k,
                  std::size_t words, const std::uint64_t* query) {
  if (words == 1) return masked_sum_1w<true>(focal, mass, k, query[0]);
  return masked_sum_nw(focal, mass, k, words,
                       [&](const std::uint64_t* f) { return row_subset(f, query, words); });
}

double plausibility_sum(const std::uint64_t* focal, const double* mass, std::size_t k,
                        std::size_t words, const std::uint64_t* query) {
  if (words == 1) return masked_sum_1w<false>(focal, mass, k, query[0]);
  return masked_sum_nw(focal, mass, k, words,
                       [&](const std::uint64_t* f) { return row_intersects(f, query, words); });
}

void bit_and(const std::uint64_t* a, const std::uint64_t* b, std::size_t words,
             std::uint64_t* out) {
  std::size_t w = 0;
  for (; w + 4 <= words; w += 4) store(out + w, _mm256_and_si256(load(a + w), load(b + w)));
  for (; w < words; ++w) out[w] = a[w] & b[w];
}

void bit_or(const std::uint64_t* a, const std::uint64_t* b, std::size_t words,
            std::uint64_t* out) {
  std::size_t w = 0;
  for (; w + 4 <= words; w += 4) store(out + w, _mm256_or_si256(load(a + w), load(b + w)));
  for (; w < words; ++w) out[w] = a[w] | b[w];
}

void bit_andnot(const std::uint64_t* a, const std::uint64_t* b, std::size_t words,
                std::uint64_t* out) {
  std::size_t w = 0;
  for (; w + 4 <= words; w += 4) store(out + w, _mm256_andnot_si256(load(b + w), load(a + w)));
  for (; w < words; ++w) out[w] = a[w] & ~b[w];
}

void intersect_rows(const std::uint64_t* row, const std::uint64_t* focal, std::size_t k,
                    std::size_t words, std::uint64_t* out) {
  if (words == 1) {
    const __m256i r = _mm256_set1_epi64x(static_cast<long long>(row[0]));
    std::size_t i = 0;
    for (; i + 4 <= k; i += 4) store(out + i, _mm256_and_si256(r, load(focal + i)));
    for (; i < k; ++i) out[i] = row[0] & focal[i];
    return;
  }
  for (std::size_t i = 0; i < k; ++i) bit_and(row, focal + i * words, words, out + i * words);
}

void scale(const double* in, double factor, std::size_t k, double* out) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= k; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(in + i), f));
  for (; i < k; ++i) out[i] = in[i] * factor;
}

std::size_t popcount(const std::uint64_t* a, std::size_t words) {
  std::size_t n = 0;
  for (std::size_t w = 0; w < words; ++w) n += static_cast<std::size_t>(std::popcount(a[w]));
  return n;
}

bool is_zero(const std::uint64_t* a, std::size_t words) {
  std::size_t w = 0;
  for (; w + 4 <= words; w += 4) {
    const __m256i v = load(a + w);
    if (!_mm256_testz_si256(v, v)) return false;
  }
  for (; w < words; ++w) {
    if (a[w] != 0) return false;
  }
  return true;
}

}  // namespace

namespace detail {

const KernelTable& avx2_table_unchecked() noexcept {
  static const KernelTable table{
      Isa::avx2, belief_sum, plausibility_sum, intersect_rows, scale,          bit_and,
      bit_or,    bit_andnot, popcount,        is_zero,        row_subset, row_intersects,
  };
  return table;
}

}  // namespace detail
}  // namespace bf::kernels
