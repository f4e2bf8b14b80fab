#include <cstring>
#include <random>
#include <vector>

#include "bf/kernels.hpp"
#include "doctest.h"

using namespace bf::kernels;

namespace {

struct Case {
  std::size_t k, words;
  std::vector<std::uint64_t> focal, query, row;
  std::vector<double> mass;
};

Case random_case(std::mt19937_64& rng, std::size_t k, std::size_t words, bool sparse) {
  Case c{k, words, {}, {}, {}, {}};
  auto draw = [&] {
    std::uint64_t v = rng();
    return sparse ? v & rng() & rng() : v;
  };
  for (std::size_t i = 0; i < k * words; ++i) c.focal.push_back(draw());
  for (std::size_t i = 0; i < words; ++i) c.query.push_back(rng() | rng());
  for (std::size_t i = 0; i < words; ++i) c.row.push_back(draw());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < k; ++i) c.mass.push_back(u(rng) / 7.0);
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(scalar_table().isa == Isa::scalar);
  CHECK(force_isa(Isa::scalar));
  CHECK(active().isa == Isa::scalar);
}

TEST_CASE("avx2 kernels are bitwise identical to the scalar reference") {
  const KernelTable* v = avx2_table();
  if (v == nullptr) {
    MESSAGE("AVX2 unavailable; equivalence test skipped");
    return;
  }
  const KernelTable& s = scalar_table();
  std::mt19937_64 rng(42);
  for (std::size_t words = 1; words <= 5; ++words) {
    for (std::size_t k = 0; k <= 37; ++k) {
      for (int rep = 0; rep < 6; ++rep) {
        Case c = random_case(rng, k, words, rep % 2 == 0);
        REQUIRE(same_bits(s.belief_sum(c.focal.data(), c.mass.data(), k, words, c.query.data()),
                          v->belief_sum(c.focal.data(), c.mass.data(), k, words, c.query.data())));
        REQUIRE(same_bits(
            s.plausibility_sum(c.focal.data(), c.mass.data(), k, words, c.query.data()),
            v->plausibility_sum(c.focal.data(), c.mass.data(), k, words, c.query.data())));

        std::vector<std::uint64_t> o1(k * words), o2(k * words);
        s.intersect_rows(c.row.data(), c.focal.data(), k, words, o1.data());
        v->intersect_rows(c.row.data(), c.focal.data(), k, words, o2.data());
        REQUIRE(o1 == o2);

        std::vector<double> d1(k), d2(k);
        s.scale(c.mass.data(), 0.37, k, d1.data());
        v->scale(c.mass.data(), 0.37, k, d2.data());
        for (std::size_t i = 0; i < k; ++i) REQUIRE(same_bits(d1[i], d2[i]));

        if (k == 0) continue;
        const std::uint64_t* a = c.focal.data();
        const std::uint64_t* b = c.query.data();
        std::vector<std::uint64_t> x1(words), x2(words);
        s.bit_and(a, b, words, x1.data());
        v->bit_and(a, b, words, x2.data());
        REQUIRE(x1 == x2);
        s.bit_or(a, b, words, x1.data());
        v->bit_or(a, b, words, x2.data());
        REQUIRE(x1 == x2);
        s.bit_andnot(a, b, words, x1.data());
        v->bit_andnot(a, b, words, x2.data());
        REQUIRE(x1 == x2);
        REQUIRE(s.popcount(a, words) == v->popcount(a, words));
        REQUIRE(s.is_zero(a, words) == v->is_zero(a, words));
        REQUIRE(s.is_subset(a, b, words) == v->is_subset(a, b, words));
        REQUIRE(s.intersects(a, b, words) == v->intersects(a, b, words));
        std::vector<std::uint64_t> zero(words, 0);
        REQUIRE(v->is_zero(zero.data(), words));
        REQUIRE(v->is_subset(zero.data(), a, words));
        REQUIRE_FALSE(v->intersects(zero.data(), a, words));
      }
    }
  }
}

TEST_CASE("masked sums follow the documented reduction order") {
  const std::uint64_t focal[6] = {1, 1, 1, 1, 1, 1};
  const double mass[6] = {1e16, 1.0, -1e16, 1.0, 0.5, 0.25};
  const std::uint64_t query = 1;
  // lanes (1e16 + 1) + (-1e16 + 1), then tail 0.5, 0.25
  const double expect = ((1e16 + 1.0) + (-1e16 + 1.0)) + 0.5 + 0.25;
  CHECK(same_bits(scalar_table().belief_sum(focal, mass, 6, 1, &query), expect));
  if (const KernelTable* v = avx2_table()) {
    CHECK(same_bits(v->belief_sum(focal, mass, 6, 1, &query), expect));
  }
}
