#include "varalpha/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace varalpha {

IntervalUnion::IntervalUnion(std::initializer_list<Interval> parts) {
  for (const auto& p : parts) add(p.lo, p.hi);
}

IntervalUnion IntervalUnion::whole_line() {
  IntervalUnion u;
  u.add(-std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity());
  return u;
}

void IntervalUnion::add(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi)
    throw std::invalid_argument("IntervalUnion: need lo <= hi");
  Interval nv{lo, hi};
  std::vector<Interval> merged;
  merged.reserve(parts_.size() + 1);
  bool placed = false;
  for (const auto& p : parts_) {
    if (p.hi < nv.lo) {
      merged.push_back(p);
    } else if (p.lo > nv.hi) {
      if (!placed) {
        merged.push_back(nv);
        placed = true;
      }
      merged.push_back(p);
    } else {  // overlap or touch: absorb into nv
      nv.lo = std::min(nv.lo, p.lo);
      nv.hi = std::max(nv.hi, p.hi);
    }
  }
  if (!placed) merged.push_back(nv);
  parts_ = std::move(merged);
}

bool IntervalUnion::contains_large(double x) const {
  auto it = std::upper_bound(
      parts_.begin(), parts_.end(), x,
      [](double v, const Interval& p) { return v < p.lo; });
  if (it == parts_.begin()) return false;
  --it;
  return x <= it->hi;
}

bool IntervalUnion::bounded() const {
  if (parts_.empty()) return true;
  return std::isfinite(parts_.front().lo) && std::isfinite(parts_.back().hi);
}

double IntervalUnion::total_length() const {
  double len = 0.0;
  for (const auto& p : parts_) len += p.hi - p.lo;
  return len;
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
  IntervalUnion out = *this;
  for (const auto& p : other.parts_) out.add(p.lo, p.hi);
  return out;
}

bool IntervalUnion::subset_of(const IntervalUnion& other, double tol) const {
  for (const auto& p : parts_) {
    bool covered = false;
    for (const auto& q : other.parts_) {
      if (p.lo >= q.lo - tol && p.hi <= q.hi + tol) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

bool IntervalUnion::same_as(const IntervalUnion& other, double tol) const {
  if (parts_.size() != other.parts_.size()) return false;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const auto& a = parts_[i];
    const auto& b = other.parts_[i];
    const bool lo_ok = (a.lo == b.lo) || std::fabs(a.lo - b.lo) <= tol;
    const bool hi_ok = (a.hi == b.hi) || std::fabs(a.hi - b.hi) <= tol;
    if (!lo_ok || !hi_ok) return false;
  }
  return true;
}

std::string IntervalUnion::describe() const {
  if (parts_.empty()) return "{}";
  std::ostringstream os;
  // large unions (lattice fields) are summarised rather than spelled out
  constexpr std::size_t kMaxSpelled = 8;
  const std::size_t shown = std::min(parts_.size(), kMaxSpelled);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) os << " u ";
    os << "[" << parts_[i].lo << "," << parts_[i].hi << "]";
  }
  if (parts_.size() > kMaxSpelled)
    os << " u ... (" << parts_.size() << " intervals, up to "
       << parts_.back().hi << ")";
  return os.str();
}

}  // namespace varalpha
