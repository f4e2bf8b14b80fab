#include "bf/subset.hpp"

#include <algorithm>
#include <unordered_set>

#include "bf/error.hpp"
#include "bf/kernels.hpp"

namespace bf {

Bits::Bits(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

Bits Bits::full(std::size_t nbits) {
  Bits b(nbits);
  for (auto& w : b.words_) w = ~std::uint64_t{0};
  if (const std::size_t tail = nbits & 63; tail != 0) {
    b.words_.back() = (std::uint64_t{1} << tail) - 1;
  }
  return b;
}

std::size_t Bits::count() const noexcept {
  return kernels::active().popcount(words_.data(), words_.size());
}

bool Bits::none() const noexcept { return kernels::active().is_zero(words_.data(), words_.size()); }

std::size_t BitsHash::operator()(const Bits& b) const noexcept {
  std::size_t h = std::hash<std::size_t>{}(b.size());
  for (std::uint64_t w : b.words()) {
    h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

// --- Frame -----------------------------------------------------------------

FramePtr Frame::create(std::string id, std::vector<std::string> labels) {
  if (id.empty()) throw validation_error("frame.id", "frame id must be nonempty");
  if (labels.empty()) {
    throw validation_error("frame.labels_nonempty", "frame '" + id + "' has no labels");
  }
  if (labels.size() > kMaxFrameSize) {
    throw validation_error("frame.max_size", "frame '" + id + "' has " +
                                                 std::to_string(labels.size()) +
                                                 " labels; at most 24 are supported");
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw validation_error("frame.labels_distinct",
                             "frame '" + id + "' repeats label '" + l + "'");
    }
  }
  return FramePtr(new Frame(std::move(id), std::move(labels)));
}

std::optional<std::size_t> Frame::find(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

std::size_t Frame::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw Error(ErrorCode::not_found,
              "label '" + std::string(label) + "' is not in frame '" + id_ + "'");
}

// --- ProductFrame ----------------------------------------------------------

ProductFramePtr ProductFrame::create(std::vector<Factor> factors) {
  if (factors.empty()) throw validation_error("product.nonempty", "product frame has no factors");
  std::unordered_set<std::string> names;
  std::size_t joint = 1;
  for (const auto& f : factors) {
    if (!f.frame) throw validation_error("product.frame", "factor '" + f.variable + "' has no frame");
    if (f.variable.empty()) throw validation_error("product.variable", "variable name is empty");
    if (!names.insert(f.variable).second) {
      throw validation_error("product.variables_distinct",
                             "variable '" + f.variable + "' appears twice");
    }
    joint *= f.frame->size();
    if (joint > kMaxJointStates) {
      throw validation_error("product.max_joint", "joint frame exceeds 2^24 states");
    }
  }
  auto p = std::shared_ptr<ProductFrame>(new ProductFrame());
  p->factors_ = std::move(factors);
  p->joint_size_ = joint;
  p->strides_.assign(p->factors_.size(), 1);
  for (std::size_t i = p->factors_.size(); i-- > 1;) {
    p->strides_[i - 1] = p->strides_[i] * p->factors_[i].frame->size();
  }
  if (p->factors_.size() == 1 && p->factors_[0].variable == p->factors_[0].frame->id()) {
    p->id_ = p->factors_[0].frame->id();
  } else {
    for (std::size_t i = 0; i < p->factors_.size(); ++i) {
      if (i > 0) p->id_ += '*';
      p->id_ += p->factors_[i].variable + ':' + p->factors_[i].frame->id();
    }
  }
  return p;
}

ProductFramePtr ProductFrame::single(FramePtr frame) {
  std::string var = frame->id();
  return create({Factor{std::move(var), std::move(frame)}});
}

std::optional<std::size_t> ProductFrame::factor_index(std::string_view variable) const noexcept {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].variable == variable) return i;
  }
  return std::nullopt;
}

std::vector<std::string> ProductFrame::variables() const {
  std::vector<std::string> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.variable);
  return out;
}

std::vector<std::size_t> ProductFrame::decode(std::size_t joint) const {
  std::vector<std::size_t> digits(factors_.size());
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    digits[i] = (joint / strides_[i]) % factors_[i].frame->size();
  }
  return digits;
}

std::size_t ProductFrame::encode(std::span<const std::size_t> digits) const {
  std::size_t joint = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) joint += digits[i] * strides_[i];
  return joint;
}

std::string ProductFrame::element_label(std::size_t joint) const {
  if (is_single()) return factors_[0].frame->label(joint);
  const auto digits = decode(joint);
  std::string out = "(";
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0) out += ',';
    out += factors_[i].frame->label(digits[i]);
  }
  return out + ')';
}

bool same_space(const ProductFrame& a, const ProductFrame& b) noexcept {
  return &a == &b || (a.id() == b.id() && a.size() == b.size());
}

// --- SubsetMask ------------------------------------------------------------

namespace {

void require_same(const SubsetMask& a, const SubsetMask& b) {
  if (!same_space(*a.space(), *b.space())) {
    throw Error(ErrorCode::frame_mismatch, "subsets live on different frames ('" +
                                               a.space()->id() + "' vs '" + b.space()->id() +
                                               "')");
  }
}

}  // namespace

SubsetMask::SubsetMask(ProductFramePtr space, Bits bits)
    : space_(std::move(space)), bits_(std::move(bits)) {
  if (!space_) throw validation_error("mask.frame", "subset has no frame");
  if (bits_.size() != space_->size()) {
    throw validation_error("mask.width", "mask width " + std::to_string(bits_.size()) +
                                             " does not match frame '" + space_->id() + "'");
  }
}

SubsetMask SubsetMask::empty(ProductFramePtr space) {
  const std::size_t n = space->size();
  return SubsetMask(std::move(space), Bits(n));
}

SubsetMask SubsetMask::full(ProductFramePtr space) {
  const std::size_t n = space->size();
  return SubsetMask(std::move(space), Bits::full(n));
}

SubsetMask SubsetMask::of(ProductFramePtr space, std::span<const std::size_t> members) {
  Bits b(space->size());
  for (std::size_t m : members) {
    if (m >= space->size()) {
      throw validation_error("mask.member_range", "element index " + std::to_string(m) +
                                                      " is outside frame '" + space->id() + "'");
    }
    b.set(m);
  }
  return SubsetMask(std::move(space), std::move(b));
}

SubsetMask SubsetMask::of(ProductFramePtr space, std::initializer_list<std::size_t> members) {
  return of(std::move(space), std::span<const std::size_t>(members.begin(), members.size()));
}

SubsetMask SubsetMask::of_labels(ProductFramePtr space, std::span<const std::string> labels) {
  if (!space->is_single()) {
    throw validation_error("mask.labels_single", "label lists address single-factor frames only");
  }
  const auto& frame = *space->factors()[0].frame;
  Bits b(space->size());
  for (const auto& l : labels) b.set(frame.index_of(l));
  return SubsetMask(std::move(space), std::move(b));
}

SubsetMask SubsetMask::of_labels(ProductFramePtr space, std::initializer_list<std::string> labels) {
  return of_labels(std::move(space), std::span<const std::string>(labels.begin(), labels.size()));
}

bool SubsetMask::contains(std::size_t element) const {
  return element < bits_.size() && bits_.test(element);
}

std::vector<std::size_t> SubsetMask::members() const {
  std::vector<std::size_t> out;
  bits_.for_each_set([&](std::size_t i) { out.push_back(i); });
  return out;
}

bool SubsetMask::is_subset_of(const SubsetMask& other) const {
  require_same(*this, other);
  return kernels::active().is_subset(bits_.words().data(), other.bits_.words().data(),
                                     bits_.word_count());
}

bool SubsetMask::intersects(const SubsetMask& other) const {
  require_same(*this, other);
  return kernels::active().intersects(bits_.words().data(), other.bits_.words().data(),
                                      bits_.word_count());
}

SubsetMask SubsetMask::intersect(const SubsetMask& other) const {
  require_same(*this, other);
  Bits out(bits_.size());
  kernels::active().bit_and(bits_.words().data(), other.bits_.words().data(), bits_.word_count(),
                            out.words().data());
  return SubsetMask(space_, std::move(out));
}

SubsetMask SubsetMask::unite(const SubsetMask& other) const {
  require_same(*this, other);
  Bits out(bits_.size());
  kernels::active().bit_or(bits_.words().data(), other.bits_.words().data(), bits_.word_count(),
                           out.words().data());
  return SubsetMask(space_, std::move(out));
}

SubsetMask SubsetMask::complement() const {
  const Bits all = Bits::full(bits_.size());
  Bits out(bits_.size());
  kernels::active().bit_andnot(all.words().data(), bits_.words().data(), bits_.word_count(),
                               out.words().data());
  return SubsetMask(space_, std::move(out));
}

// --- projection and extension ----------------------------------------------

ProductFramePtr restrict_space(const ProductFramePtr& space, std::span<const std::string> targets) {
  if (targets.empty()) throw validation_error("project.targets_nonempty", "no target variables");
  for (const auto& t : targets) {
    if (!space->has_variable(t)) {
      throw Error(ErrorCode::not_found,
                  "variable '" + t + "' is not in frame '" + space->id() + "'");
    }
  }
  std::vector<Factor> kept;
  for (const auto& f : space->factors()) {
    if (std::find(targets.begin(), targets.end(), f.variable) != targets.end()) kept.push_back(f);
  }
  if (kept.size() == space->factors().size()) return space;
  return ProductFrame::create(std::move(kept));
}

ProductFramePtr union_space(const ProductFramePtr& a, const ProductFramePtr& b) {
  if (same_space(*a, *b)) return a;
  std::vector<Factor> factors = a->factors();
  bool added = false;
  for (const auto& f : b->factors()) {
    if (auto i = a->factor_index(f.variable)) {
      if (a->factors()[*i].frame->id() != f.frame->id()) {
        throw Error(ErrorCode::frame_mismatch, "variable '" + f.variable +
                                                   "' has different frames in '" + a->id() +
                                                   "' and '" + b->id() + "'");
      }
    } else {
      factors.push_back(f);
      added = true;
    }
  }
  if (!added) return a;
  return ProductFrame::create(std::move(factors));
}

namespace {

// For each factor of `target`, its index in `source`; throws if missing or
// bound to a different frame.
std::vector<std::size_t> factor_map(const ProductFrame& target, const ProductFrame& source) {
  std::vector<std::size_t> map;
  map.reserve(target.factors().size());
  for (const auto& f : target.factors()) {
    auto i = source.factor_index(f.variable);
    if (!i) {
      throw Error(ErrorCode::frame_mismatch, "variable '" + f.variable + "' of '" + target.id() +
                                                 "' is not in '" + source.id() + "'");
    }
    if (source.factors()[*i].frame->id() != f.frame->id()) {
      throw Error(ErrorCode::frame_mismatch,
                  "variable '" + f.variable + "' is bound to different frames");
    }
    map.push_back(*i);
  }
  return map;
}

}  // namespace

SubsetMask project_to(const SubsetMask& mask, const ProductFramePtr& target_space) {
  const ProductFrame& src = *mask.space();
  if (same_space(src, *target_space)) return mask;
  const auto map = factor_map(*target_space, src);
  Bits out(target_space->size());
  std::vector<std::size_t> digits(map.size());
  mask.bits().for_each_set([&](std::size_t j) {
    const auto full = src.decode(j);
    for (std::size_t t = 0; t < map.size(); ++t) digits[t] = full[map[t]];
    out.set(target_space->encode(digits));
  });
  return SubsetMask(target_space, std::move(out));
}

SubsetMask project(const SubsetMask& mask, std::span<const std::string> targets) {
  return project_to(mask, restrict_space(mask.space(), targets));
}

SubsetMask project(const SubsetMask& mask, std::initializer_list<std::string> targets) {
  return project(mask, std::span<const std::string>(targets.begin(), targets.size()));
}

SubsetMask vacuous_extend(const SubsetMask& mask, const ProductFramePtr& to) {
  const ProductFrame& from = *mask.space();
  if (same_space(from, *to)) return mask;
  const auto map = factor_map(from, *to);
  Bits out(to->size());
  std::vector<std::size_t> digits(map.size());
  for (std::size_t j = 0; j < to->size(); ++j) {
    const auto full = to->decode(j);
    for (std::size_t t = 0; t < map.size(); ++t) digits[t] = full[map[t]];
    if (mask.bits().test(from.encode(digits))) out.set(j);
  }
  return SubsetMask(to, std::move(out));
}

}  // namespace bf
