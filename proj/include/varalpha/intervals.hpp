#pragma once

#include <string>
#include <vector>

namespace varalpha {

// Closed interval; endpoints may be +-infinity. Degenerate (lo == hi) is
// allowed but has zero length.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Finite union of disjoint closed intervals, kept sorted and merged. Used for
// level sets, occupation targets and minimum sets; membership at a shared
// endpoint is a zero-measure convention and callers must not rely on it.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  IntervalUnion(std::initializer_list<Interval> parts);
  static IntervalUnion whole_line();

  void add(double lo, double hi);  // merges with existing parts

  bool contains(double x) const {
    // small unions dominate in hot loops; linear scan beats binary search
    // until ~16 parts and stays branch-predictable
    if (parts_.size() <= 16) {
      for (const auto& p : parts_) {
        if (x < p.lo) return false;
        if (x <= p.hi) return true;
      }
      return false;
    }
    return contains_large(x);
  }

  bool empty() const { return parts_.empty(); }
  bool bounded() const;
  double total_length() const;  // +inf when unbounded
  std::size_t size() const { return parts_.size(); }
  const std::vector<Interval>& parts() const { return parts_; }

  IntervalUnion unite(const IntervalUnion& other) const;

  // True when every part of *this sits inside some part of `other`, with
  // endpoint slack `tol`.
  bool subset_of(const IntervalUnion& other, double tol) const;

  bool same_as(const IntervalUnion& other, double tol) const;

  std::string describe() const;  // e.g. "[0,1] u [4,5]"

 private:
  bool contains_large(double x) const;
  std::vector<Interval> parts_;
};

}  // namespace varalpha
