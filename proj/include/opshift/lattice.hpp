#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace opshift {

/// A point of the lattice N^d. Components are non-negative; the dimension is
/// fixed at construction.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t d) : c_(d, 0) {}
  MultiIndex(std::initializer_list<int> components);
  explicit MultiIndex(std::vector<int> components);

  static MultiIndex zero(std::size_t d) { return MultiIndex(d); }
  /// The unit vector along `axis` (0-based).
  static MultiIndex unit(std::size_t d, std::size_t axis);

  std::size_t dim() const { return c_.size(); }
  int operator[](std::size_t i) const { return c_[i]; }
  const std::vector<int>& components() const { return c_; }

  /// |alpha| = sum of components.
  int order() const;
  bool is_zero() const { return order() == 0; }

  /// Componentwise beta <= alpha.
  bool dominates(const MultiIndex& beta) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Componentwise difference; caller guarantees dominates(other).
  MultiIndex operator-(const MultiIndex& other) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

  std::string to_string() const;

 private:
  std::vector<int> c_;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& a) const noexcept;
};

/// alpha + e_axis.
MultiIndex add_unit(const MultiIndex& alpha, std::size_t axis);

/// alpha - e_axis, or nullopt when alpha_axis == 0 (the step leaves the lattice).
std::optional<MultiIndex> sub_unit(const MultiIndex& alpha, std::size_t axis);

/// |alpha|! / alpha!, the multinomial coefficient.
double multinomial(const MultiIndex& alpha);

/// The graded window {alpha in N^d : |alpha| <= cap}, enumerated in graded
/// lexicographic order: by |alpha|, then with larger leading components first,
/// e.g. (0,0), (1,0), (0,1), (2,0), ... for d = 2.
class TruncationBox {
 public:
  TruncationBox() = default;
  TruncationBox(std::size_t d, int cap);

  std::size_t dim() const { return d_; }
  int cap() const { return cap_; }
  std::size_t size() const { return indices_.size(); }

  bool contains(const MultiIndex& alpha) const;
  /// |alpha| <= cap - margin.
  bool interior(const MultiIndex& alpha, int margin) const;

  std::size_t rank(const MultiIndex& alpha) const;
  std::optional<std::size_t> find(const MultiIndex& alpha) const;
  const MultiIndex& unrank(std::size_t i) const { return indices_.at(i); }

  const std::vector<MultiIndex>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  /// Number of indices with |alpha| <= layer.
  std::size_t layer_end(int layer) const;

  friend bool operator==(const TruncationBox& a, const TruncationBox& b) {
    return a.d_ == b.d_ && a.cap_ == b.cap_;
  }

 private:
  std::size_t d_ = 0;
  int cap_ = 0;
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> rank_;
};

/// All multi-indices with |alpha| <= cap in graded lexicographic order.
std::vector<MultiIndex> enumerate(const TruncationBox& box);

/// C(n, k) as a size, exact for desk-scale arguments.
std::size_t binomial(int n, int k);

}  // namespace opshift
