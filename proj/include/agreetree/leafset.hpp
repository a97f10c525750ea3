#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace agreetree {

/// Leaf labels are positive integers.
using Label = std::int64_t;

/// Sorted, duplicate-free set of leaf labels.
class LeafSet {
 public:
  using const_iterator = std::vector<Label>::const_iterator;

  LeafSet() = default;
  LeafSet(std::initializer_list<Label> labels) : labels_(labels) { normalize(); }
  explicit LeafSet(std::vector<Label> labels) : labels_(std::move(labels)) { normalize(); }

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  const_iterator begin() const noexcept { return labels_.begin(); }
  const_iterator end() const noexcept { return labels_.end(); }
  Label min() const { return labels_.front(); }
  Label max() const { return labels_.back(); }
  const std::vector<Label>& labels() const noexcept { return labels_; }

  bool contains(Label x) const { return std::binary_search(labels_.begin(), labels_.end(), x); }

  bool is_subset_of(const LeafSet& other) const {
    return std::includes(other.labels_.begin(), other.labels_.end(), labels_.begin(), labels_.end());
  }

  void insert(Label x) {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), x);
    if (it == labels_.end() || *it != x) labels_.insert(it, x);
  }

  friend bool operator==(const LeafSet&, const LeafSet&) = default;
  friend auto operator<=>(const LeafSet& a, const LeafSet& b) { return a.labels_ <=> b.labels_; }

 private:
  void normalize() {
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  }

  std::vector<Label> labels_;
};

inline LeafSet set_intersection(const LeafSet& a, const LeafSet& b) {
  std::vector<Label> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return LeafSet(std::move(out));
}

inline LeafSet set_union(const LeafSet& a, const LeafSet& b) {
  std::vector<Label> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return LeafSet(std::move(out));
}

inline LeafSet set_difference(const LeafSet& a, const LeafSet& b) {
  std::vector<Label> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return LeafSet(std::move(out));
}

/// Comma-separated labels, e.g. "1,3,4".
inline std::string to_string(const LeafSet& s) {
  std::string out;
  for (Label x : s) {
    if (!out.empty()) out += ',';
    out += std::to_string(x);
  }
  return out;
}

}  // namespace agreetree
