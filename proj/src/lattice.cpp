#include "opshift/lattice.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "opshift/errors.hpp"

namespace opshift {

MultiIndex::MultiIndex(std::initializer_list<int> components) : c_(components) {
  for (int v : c_) {
    if (v < 0) throw DomainError("multi-index components must be non-negative");
  }
}

MultiIndex::MultiIndex(std::vector<int> components) : c_(std::move(components)) {
  for (int v : c_) {
    if (v < 0) throw DomainError("multi-index components must be non-negative");
  }
}

MultiIndex MultiIndex::unit(std::size_t d, std::size_t axis) {
  MultiIndex e(d);
  e.c_.at(axis) = 1;
  return e;
}

int MultiIndex::order() const { return std::accumulate(c_.begin(), c_.end(), 0); }

bool MultiIndex::dominates(const MultiIndex& beta) const {
  if (beta.dim() != dim()) return false;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (beta.c_[i] > c_[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  MultiIndex r(*this);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += other.c_.at(i);
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  MultiIndex r(*this);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    r.c_[i] -= other.c_.at(i);
    if (r.c_[i] < 0) throw DomainError("multi-index difference leaves N^d");
  }
  return r;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) os << ',';
    os << c_[i];
  }
  os << ')';
  return os.str();
}

std::size_t MultiIndexHash::operator()(const MultiIndex& a) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int v : a.components()) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

MultiIndex add_unit(const MultiIndex& alpha, std::size_t axis) {
  if (axis >= alpha.dim()) throw DomainError("axis out of range");
  std::vector<int> c = alpha.components();
  ++c[axis];
  return MultiIndex(std::move(c));
}

std::optional<MultiIndex> sub_unit(const MultiIndex& alpha, std::size_t axis) {
  if (axis >= alpha.dim()) throw DomainError("axis out of range");
  if (alpha[axis] == 0) return std::nullopt;
  std::vector<int> c = alpha.components();
  --c[axis];
  return MultiIndex(std::move(c));
}

double multinomial(const MultiIndex& alpha) {
  // Product of binomials keeps intermediate values small.
  double r = 1.0;
  int running = 0;
  for (int v : alpha.components()) {
    for (int k = 1; k <= v; ++k) {
      ++running;
      r = r * running / k;
    }
  }
  return r;
}

namespace {

void fill_layer(std::vector<int>& prefix, std::size_t d, int remaining,
                std::vector<MultiIndex>& out) {
  if (prefix.size() + 1 == d) {
    prefix.push_back(remaining);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    prefix.push_back(v);
    fill_layer(prefix, d, remaining - v, out);
    prefix.pop_back();
  }
}

}  // namespace

TruncationBox::TruncationBox(std::size_t d, int cap) : d_(d), cap_(cap) {
  if (d < 1) throw BoxError("dimension d must be at least 1");
  if (cap < 1) throw BoxError("degree cap must be at least 1");
  std::vector<int> prefix;
  for (int layer = 0; layer <= cap; ++layer) fill_layer(prefix, d, layer, indices_);
  rank_.reserve(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) rank_.emplace(indices_[i], i);
}

bool TruncationBox::contains(const MultiIndex& alpha) const {
  return alpha.dim() == d_ && alpha.order() <= cap_;
}

bool TruncationBox::interior(const MultiIndex& alpha, int margin) const {
  return alpha.dim() == d_ && alpha.order() <= cap_ - margin;
}

std::size_t TruncationBox::rank(const MultiIndex& alpha) const {
  auto it = rank_.find(alpha);
  if (it == rank_.end()) throw BoxError("multi-index " + alpha.to_string() + " outside the box");
  return it->second;
}

std::optional<std::size_t> TruncationBox::find(const MultiIndex& alpha) const {
  auto it = rank_.find(alpha);
  if (it == rank_.end()) return std::nullopt;
  return it->second;
}

std::size_t TruncationBox::layer_end(int layer) const {
  if (layer < 0) return 0;
  if (layer >= cap_) return indices_.size();
  return binomial(layer + static_cast<int>(d_), static_cast<int>(d_));
}

std::vector<MultiIndex> enumerate(const TruncationBox& box) { return box.indices(); }

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

}  // namespace opshift
