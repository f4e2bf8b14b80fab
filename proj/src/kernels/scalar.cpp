#include <bit>

#include "bf/kernels.hpp"
#include "kernels_internal.hpp"

namespace bf::kernels {
namespace {

bool row_subset(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  for (std::size_t w = 0; w < words; ++w) {
    if ((a[w] & ~b[w]) != 0) return false;
  }
  return true;
}

bool row_intersects(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  for (std::size_t w = 0; w < words; ++w) {
    if ((a[w] & b[w]) != 0) return true;
  }
  return false;
}

template <class Pred>
double masked_sum(const std::uint64_t* focal, const double* mass, std::size_t k,
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
  return masked_sum(focal, mass, k, words,
                    [&](const std::uint64_t* f) { return row_subset(f, query, words); });
}

double plausibility_sum(const std::uint64_t* focal, const double* mass, std::size_t k,
                        std::size_t words, const std::uint64_t* query) {
  return masked_sum(focal, mass, k, words,
                    [&](const std::uint64_t* f) { return row_intersects(f, query, words); });
}

void intersect_rows(const std::uint64_t* row, const std::uint64_t* focal, std::size_t k,
                    std::size_t words, std::uint64_t* out) {
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t w = 0; w < words; ++w) out[i * words + w] = row[w] & focal[i * words + w];
  }
}

void scale(const double* in, double factor, std::size_t k, double* out) {
  for (std::size_t i = 0; i < k; ++i) out[i] = in[i] * factor;
}

void bit_and(const std::uint64_t* a, const std::uint64_t* b, std::size_t words,
             std::uint64_t* out) {
  for (std::size_t w = 0; w < words; ++w) out[w] = a[w] & b[w];
}

void bit_or(const std::uint64_t* a, const std::uint64_t* b, std::size_t words,
            std::uint64_t* out) {
  for (std::size_t w = 0; w < words; ++w) out[w] = a[w] | b[w];
}

void bit_andnot(const std::uint64_t* a, const std::uint64_t* b, std::size_t words,
                std::uint64_t* out) {
  for (std::size_t w = 0; w < words; ++w) out[w] = a[w] & ~b[w];
}

std::size_t popcount(const std::uint64_t* a, std::size_t words) {
  std::size_t n = 0;
  for (std::size_t w = 0; w < words; ++w) n += static_cast<std::size_t>(std::popcount(a[w]));
  return n;
}

bool is_zero(const std::uint64_t* a, std::size_t words) {
  for (std::size_t w = 0; w < words; ++w) {
    if (a[w] != 0) return false;
  }
  return true;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{
      Isa::scalar, belief_sum, plausibility_sum, intersect_rows, scale,          bit_and,
      bit_or,      bit_andnot, popcount,        is_zero,        row_subset, row_intersects,
  };
  return table;
}

}  // namespace bf::kernels
