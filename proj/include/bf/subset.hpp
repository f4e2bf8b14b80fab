#pragma once

// Finite frames, product frames and subsets of them as bitmasks.
//
// A Frame is a labelled state space of at most 24 elements. A ProductFrame is
// an ordered list of (variable, Frame) factors; its joint states are tuples
// numbered row-major over the factor order (the last factor varies fastest).
// Every subset lives on a ProductFrame; a plain Frame is lifted to the
// single-factor ProductFrame whose variable is named after the frame id.

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bf {

inline constexpr std::size_t kMaxFrameSize = 24;
inline constexpr std::size_t kMaxJointStates = std::size_t{1} << 24;

/// Fixed-width bit vector; bit i is element i of the owning frame.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t nbits);
  static Bits full(std::size_t nbits);

  std::size_t size() const noexcept { return nbits_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  std::size_t count() const noexcept;
  bool none() const noexcept;

  template <class Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word != 0) {
        const int bit = std::countr_zero(word);
        fn(w * 64 + static_cast<std::size_t>(bit));
        word &= word - 1;
      }
    }
  }

  friend bool operator==(const Bits&, const Bits&) = default;
  friend std::strong_ordering operator<=>(const Bits& a, const Bits& b) {
    if (auto c = a.nbits_ <=> b.nbits_; c != 0) return c;
    return a.words_ <=> b.words_;
  }

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BitsHash {
  std::size_t operator()(const Bits& b) const noexcept;
};

class Frame;
using FramePtr = std::shared_ptr<const Frame>;

class Frame {
 public:
  /// Throws on empty, oversized (> 24) or duplicate labels.
  static FramePtr create(std::string id, std::vector<std::string> labels);

  const std::string& id() const noexcept { return id_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  std::optional<std::size_t> find(std::string_view label) const noexcept;
  std::size_t index_of(std::string_view label) const;  // throws not_found

 private:
  Frame(std::string id, std::vector<std::string> labels)
      : id_(std::move(id)), labels_(std::move(labels)) {}

  std::string id_;
  std::vector<std::string> labels_;
};

struct Factor {
  std::string variable;
  FramePtr frame;
};

class ProductFrame;
using ProductFramePtr = std::shared_ptr<const ProductFrame>;

class ProductFrame {
 public:
  static ProductFramePtr create(std::vector<Factor> factors);
  static ProductFramePtr single(FramePtr frame);

  /// Identity. A single factor named after its frame has the frame's id;
  /// otherwise "var:frame*var:frame..." in factor order.
  const std::string& id() const noexcept { return id_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }
  std::size_t size() const noexcept { return joint_size_; }
  bool is_single() const noexcept { return factors_.size() == 1; }

  std::optional<std::size_t> factor_index(std::string_view variable) const noexcept;
  bool has_variable(std::string_view variable) const noexcept {
    return factor_index(variable).has_value();
  }
  std::vector<std::string> variables() const;

  std::vector<std::size_t> decode(std::size_t joint) const;
  std::size_t encode(std::span<const std::size_t> digits) const;

  /// Element label: the frame label for single frames, "(a,b,...)" otherwise.
  std::string element_label(std::size_t joint) const;

 private:
  ProductFrame() = default;

  std::string id_;
  std::vector<Factor> factors_;
  std::vector<std::size_t> strides_;
  std::size_t joint_size_ = 0;
};

bool same_space(const ProductFrame& a, const ProductFrame& b) noexcept;

/// Subset of a product frame. Equality requires the same frame id.
class SubsetMask {
 public:
  SubsetMask(ProductFramePtr space, Bits bits);

  static SubsetMask empty(ProductFramePtr space);
  static SubsetMask full(ProductFramePtr space);
  static SubsetMask of(ProductFramePtr space, std::initializer_list<std::size_t> members);
  static SubsetMask of(ProductFramePtr space, std::span<const std::size_t> members);
  /// Labels of a single-factor frame.
  static SubsetMask of_labels(ProductFramePtr space, std::span<const std::string> labels);
  static SubsetMask of_labels(ProductFramePtr space, std::initializer_list<std::string> labels);

  const ProductFramePtr& space() const noexcept { return space_; }
  const Bits& bits() const noexcept { return bits_; }

  std::size_t cardinality() const noexcept { return bits_.count(); }
  bool is_empty() const noexcept { return bits_.none(); }
  bool is_full() const noexcept { return cardinality() == space_->size(); }
  bool contains(std::size_t element) const;
  std::vector<std::size_t> members() const;

  // Binary operations throw Error(frame_mismatch) across frames.
  bool is_subset_of(const SubsetMask& other) const;
  bool intersects(const SubsetMask& other) const;
  SubsetMask intersect(const SubsetMask& other) const;
  SubsetMask unite(const SubsetMask& other) const;
  SubsetMask complement() const;

  friend bool operator==(const SubsetMask& a, const SubsetMask& b) {
    return same_space(*a.space_, *b.space_) && a.bits_ == b.bits_;
  }

 private:
  ProductFramePtr space_;
  Bits bits_;
};

/// Frame restricted to `targets`, factor order preserved from `space`.
ProductFramePtr restrict_space(const ProductFramePtr& space, std::span<const std::string> targets);

/// Union of variable sets: `a`'s factors then `b`'s new ones. Shared
/// variables must refer to the same frame.
ProductFramePtr union_space(const ProductFramePtr& a, const ProductFramePtr& b);

/// Drop the coordinates not in `targets` from every member.
SubsetMask project(const SubsetMask& mask, std::span<const std::string> targets);
SubsetMask project(const SubsetMask& mask, std::initializer_list<std::string> targets);
SubsetMask project_to(const SubsetMask& mask, const ProductFramePtr& target_space);

/// Cylinder extension: mask x (frames of the variables in `to` but not in
/// the mask's frame). Throws if the mask's variables are not a subset of
/// `to`'s.
SubsetMask vacuous_extend(const SubsetMask& mask, const ProductFramePtr& to);

}  // namespace bf
