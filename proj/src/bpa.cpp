#include "bf/bpa.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "bf/error.hpp"
#include "bf/kernels.hpp"

namespace bf {

std::string_view to_string(BpaClass c) noexcept {
  switch (c) {
    case BpaClass::vacuous:
      return "vacuous";
    case BpaClass::deterministic:
      return "deterministic";
    case BpaClass::bayesian:
      return "bayesian";
    case BpaClass::consonant:
      return "consonant";
    case BpaClass::general:
      return "general";
  }
  return "general";
}

namespace {

double ordered_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

void check_total(double total) {
  if (!(std::fabs(total - 1.0) <= kMassTolerance)) {
    throw validation_error("bpa.mass_sum", "masses sum to " + std::to_string(total) +
                                               ", expected 1 within 1e-9");
  }
}

}  // namespace

// --- Bpa -------------------------------------------------------------------

Bpa Bpa::make(ProductFramePtr space, std::vector<std::pair<SubsetMask, double>> assignments) {
  if (!space) throw validation_error("bpa.frame", "BPA has no frame");
  if (assignments.empty()) throw validation_error("bpa.nonempty", "BPA has no focal sets");
  double total = 0.0;
  for (const auto& [set, mass] : assignments) {
    if (!same_space(*set.space(), *space)) {
      throw Error(ErrorCode::frame_mismatch, "focal set on frame '" + set.space()->id() +
                                                 "' given for BPA on '" + space->id() + "'");
    }
    if (set.is_empty()) {
      throw validation_error("bpa.no_empty_focal", "the empty set cannot carry mass");
    }
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      throw validation_error("bpa.positive_mass", "focal masses must be strictly positive");
    }
  }
  std::sort(assignments.begin(), assignments.end(),
            [](const auto& a, const auto& b) { return a.first.bits() < b.first.bits(); });
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (i > 0 && assignments[i].first.bits() == assignments[i - 1].first.bits()) {
      throw validation_error("bpa.distinct_focal", "a focal set is listed twice");
    }
    total += assignments[i].second;
  }
  check_total(total);
  // Rounding-level deviations are kept so that serialized BPAs load back bit for bit.
  if (std::fabs(total - 1.0) <= kRenormalizeThreshold) total = 1.0;

  Bpa m;
  m.space_ = std::move(space);
  m.words_ = (m.space_->size() + 63) / 64;
  m.words_flat_.reserve(assignments.size() * m.words_);
  m.masses_.reserve(assignments.size());
  for (const auto& [set, mass] : assignments) {
    auto w = set.bits().words();
    m.words_flat_.insert(m.words_flat_.end(), w.begin(), w.end());
    m.masses_.push_back(total == 1.0 ? mass : mass / total);
  }
  return m;
}

Bpa Bpa::make(FramePtr frame, std::vector<std::pair<SubsetMask, double>> assignments) {
  return make(ProductFrame::single(std::move(frame)), std::move(assignments));
}

Bpa Bpa::vacuous(ProductFramePtr space) {
  auto full = SubsetMask::full(space);
  return make(std::move(space), {{std::move(full), 1.0}});
}

Bpa Bpa::deterministic(const SubsetMask& focal) { return make(focal.space(), {{focal, 1.0}}); }

SubsetMask Bpa::focal_set(std::size_t i) const {
  if (i >= size()) throw Error(ErrorCode::not_found, "focal index out of range");
  Bits b(space_->size());
  auto src = focal_words(i);
  std::copy(src.begin(), src.end(), b.words().begin());
  return SubsetMask(space_, std::move(b));
}

std::vector<FocalElement> Bpa::focal() const {
  std::vector<FocalElement> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back({focal_set(i), masses_[i]});
  return out;
}

double Bpa::mass_of(const SubsetMask& set) const {
  if (!same_space(*set.space(), *space_)) {
    throw Error(ErrorCode::frame_mismatch, "subset is not on frame '" + space_->id() + "'");
  }
  auto target = set.bits().words();
  for (std::size_t i = 0; i < size(); ++i) {
    auto w = focal_words(i);
    if (std::equal(w.begin(), w.end(), target.begin())) return masses_[i];
  }
  return 0.0;
}

bool operator==(const Bpa& a, const Bpa& b) {
  return same_space(*a.space_, *b.space_) && a.words_flat_ == b.words_flat_ &&
         a.masses_ == b.masses_;
}

bool approx_equal(const Bpa& a, const Bpa& b, double tol) {
  if (!same_space(*a.space(), *b.space())) return false;
  if (a.focal_words().size() != b.focal_words().size()) return false;
  if (!std::equal(a.focal_words().begin(), a.focal_words().end(), b.focal_words().begin())) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::fabs(a.mass(i) - b.mass(i)) > tol) return false;
  }
  return true;
}

// --- BpaBuilder ------------------------------------------------------------

BpaBuilder::BpaBuilder(ProductFramePtr space) : space_(std::move(space)) {}

void BpaBuilder::add(Bits bits, double mass) { parts_.emplace_back(std::move(bits), mass); }

void BpaBuilder::add(const SubsetMask& set, double mass) {
  if (!same_space(*set.space(), *space_)) {
    throw Error(ErrorCode::frame_mismatch, "subset is not on frame '" + space_->id() + "'");
  }
  add(set.bits(), mass);
}

Bpa BpaBuilder::build(double divisor) && {
  std::sort(parts_.begin(), parts_.end(), [](const auto& a, const auto& b) {
    if (auto c = a.first <=> b.first; c != 0) return c < 0;
    return a.second < b.second;
  });
  Bpa m;
  m.space_ = space_;
  m.words_ = (space_->size() + 63) / 64;
  double total = 0.0;
  for (std::size_t i = 0; i < parts_.size();) {
    const Bits& key = parts_[i].first;
    if (key.none()) throw validation_error("bpa.no_empty_focal", "the empty set cannot carry mass");
    double acc = 0.0;
    std::size_t j = i;
    for (; j < parts_.size() && parts_[j].first == key; ++j) acc += parts_[j].second;
    const double mass = acc / divisor;
    if (mass > 0.0) {
      auto w = key.words();
      m.words_flat_.insert(m.words_flat_.end(), w.begin(), w.end());
      m.masses_.push_back(mass);
      total += mass;
    }
    i = j;
  }
  if (m.masses_.empty()) throw validation_error("bpa.nonempty", "BPA has no focal sets");
  check_total(total);
  return m;
}

// --- Bel / Pl ----------------------------------------------------------------

namespace {

void require_on(const Bpa& m, const SubsetMask& a) {
  if (!same_space(*a.space(), *m.space())) {
    throw Error(ErrorCode::frame_mismatch, "subset on '" + a.space()->id() +
                                               "' queried against BPA on '" + m.space()->id() +
                                               "'");
  }
}

}  // namespace

double belief(const Bpa& m, const SubsetMask& a) {
  require_on(m, a);
  return kernels::active().belief_sum(m.focal_words().data(), m.masses().data(), m.size(),
                                      m.words_per_mask(), a.bits().words().data());
}

double plausibility(const Bpa& m, const SubsetMask& a) {
  require_on(m, a);
  return kernels::active().plausibility_sum(m.focal_words().data(), m.masses().data(), m.size(),
                                            m.words_per_mask(), a.bits().words().data());
}

// --- combination -------------------------------------------------------------

Bpa extend(const Bpa& m, const ProductFramePtr& to) {
  if (same_space(*m.space(), *to)) return m;
  BpaBuilder b(to);
  for (std::size_t i = 0; i < m.size(); ++i) b.add(vacuous_extend(m.focal_set(i), to), m.mass(i));
  return std::move(b).build();
}

Combination combine_dempster(const Bpa& m1, const Bpa& m2) {
  const ProductFramePtr space = union_space(m1.space(), m2.space());
  const Bpa x = extend(m1, space);
  const Bpa y = extend(m2, space);

  const auto& kt = kernels::active();
  const std::size_t words = x.words_per_mask();
  const std::size_t k2 = y.size();
  std::vector<std::uint64_t> rows(k2 * words);
  std::vector<double> products(k2);
  std::vector<double> conflicts;
  BpaBuilder builder(space);

  for (std::size_t i = 0; i < x.size(); ++i) {
    kt.intersect_rows(x.focal_words(i).data(), y.focal_words().data(), k2, words, rows.data());
    kt.scale(y.masses().data(), x.mass(i), k2, products.data());
    for (std::size_t j = 0; j < k2; ++j) {
      const std::uint64_t* row = rows.data() + j * words;
      if (kt.is_zero(row, words)) {
        conflicts.push_back(products[j]);
        continue;
      }
      Bits bits(space->size());
      std::memcpy(bits.words().data(), row, words * sizeof(std::uint64_t));
      builder.add(std::move(bits), products[j]);
    }
  }

  const double normalizer = 1.0 - ordered_sum(std::move(conflicts));
  if (normalizer <= kConflictThreshold) {
    throw Error(ErrorCode::total_conflict, "BPAs are in total conflict and cannot be combined",
                "dempster.nonzero_normalizer");
  }
  return Combination{std::move(builder).build(normalizer), normalizer};
}

Bpa combine_all(std::span<const Bpa> operands) {
  if (operands.empty()) throw validation_error("combine.nonempty", "nothing to combine");
  Bpa acc = operands[0];
  for (std::size_t i = 1; i < operands.size(); ++i) acc = combine_dempster(acc, operands[i]).bpa;
  return acc;
}

// --- marginalization ---------------------------------------------------------

Bpa marginalize_to(const Bpa& m, const ProductFramePtr& target_space) {
  if (same_space(*m.space(), *target_space)) return m;
  BpaBuilder b(target_space);
  for (std::size_t i = 0; i < m.size(); ++i) {
    b.add(project_to(m.focal_set(i), target_space), m.mass(i));
  }
  return std::move(b).build();
}

Bpa marginalize(const Bpa& m, std::span<const std::string> targets) {
  return marginalize_to(m, restrict_space(m.space(), targets));
}

Bpa marginalize(const Bpa& m, std::initializer_list<std::string> targets) {
  return marginalize(m, std::span<const std::string>(targets.begin(), targets.size()));
}

// --- conditional embedding ---------------------------------------------------

Bpa conditional_embed(const Bpa& cond, const SubsetMask& given, const ProductFramePtr& joint) {
  if (given.cardinality() != 1) {
    throw validation_error("embed.singleton_given",
                           "conditioning event must be a single element, got " +
                               std::to_string(given.cardinality()));
  }
  for (const auto& f : given.space()->factors()) {
    if (cond.space()->has_variable(f.variable)) {
      throw Error(ErrorCode::frame_mismatch,
                  "variable '" + f.variable + "' appears on both sides of the conditional");
    }
  }
  const SubsetMask elsewhere = vacuous_extend(given.complement(), joint);
  BpaBuilder b(joint);
  for (std::size_t i = 0; i < cond.size(); ++i) {
    b.add(vacuous_extend(cond.focal_set(i), joint).unite(elsewhere), cond.mass(i));
  }
  return std::move(b).build();
}

// --- classification ----------------------------------------------------------

BpaClass classify(const Bpa& m) {
  if (m.size() == 1) {
    return m.focal_set(0).is_full() ? BpaClass::vacuous : BpaClass::deterministic;
  }
  const auto& kt = kernels::active();
  const std::size_t words = m.words_per_mask();
  bool bayesian = true;
  std::vector<std::pair<std::size_t, std::size_t>> by_size;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::size_t c = kt.popcount(m.focal_words(i).data(), words);
    if (c != 1) bayesian = false;
    by_size.emplace_back(c, i);
  }
  if (bayesian) return BpaClass::bayesian;
  std::sort(by_size.begin(), by_size.end());
  for (std::size_t i = 1; i < by_size.size(); ++i) {
    if (!kt.is_subset(m.focal_words(by_size[i - 1].second).data(),
                      m.focal_words(by_size[i].second).data(), words)) {
      return BpaClass::general;
    }
  }
  return BpaClass::consonant;
}

}  // namespace bf
