#pragma once

#include <random>
#include <string>
#include <vector>

#include "bf/bpa.hpp"
#include "bf/subset.hpp"

namespace bf::test {

inline FramePtr frame_of(const std::string& id, std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(id + std::to_string(i));
  return Frame::create(id, labels);
}

inline Bits random_nonempty_bits(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> coin(0, 1);
  Bits b(n);
  do {
    for (std::size_t i = 0; i < n; ++i) {
      if (coin(rng)) b.set(i); else b.reset(i);
    }
  } while (b.none());
  return b;
}

/// Random BPA with up to `max_focal` distinct focal sets.
inline Bpa random_bpa(std::mt19937_64& rng, const ProductFramePtr& space, std::size_t max_focal) {
  std::uniform_int_distribution<std::size_t> count(1, max_focal);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  const std::size_t k = count(rng);
  std::vector<Bits> sets;
  for (std::size_t tries = 0; sets.size() < k && tries < 100; ++tries) {
    Bits b = random_nonempty_bits(rng, space->size());
    if (std::find(sets.begin(), sets.end(), b) == sets.end()) sets.push_back(std::move(b));
  }
  std::vector<double> w;
  double total = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    w.push_back(weight(rng));
    total += w.back();
  }
  std::vector<std::pair<SubsetMask, double>> parts;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    parts.emplace_back(SubsetMask(space, sets[i]), w[i] / total);
  }
  return Bpa::make(space, std::move(parts));
}

inline Bpa random_bayesian(std::mt19937_64& rng, const ProductFramePtr& space) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<double> w(space->size());
  double total = 0.0;
  for (auto& x : w) total += (x = weight(rng));
  std::vector<std::pair<SubsetMask, double>> parts;
  for (std::size_t i = 0; i < w.size(); ++i) {
    parts.emplace_back(SubsetMask::of(space, {i}), w[i] / total);
  }
  return Bpa::make(space, std::move(parts));
}

}  // namespace bf::test
