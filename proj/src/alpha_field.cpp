#include "varalpha/alpha_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace varalpha {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_order_value(double a, FieldLimits limits) {
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("alpha field: order values must lie in (0,1)");
  if (a < limits.min_allowed || a > limits.max_allowed)
    throw std::invalid_argument(
        "alpha field: order value outside the allowed band [" +
        std::to_string(limits.min_allowed) + "," +
        std::to_string(limits.max_allowed) + "]; widen FieldLimits to override");
}

}  // namespace

const char* to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::LocalizeOccupation: return "LocalizeOccupation";
    case RegimeKind::LocalizeProbability: return "LocalizeProbability";
    case RegimeKind::Delocalize: return "Delocalize";
    case RegimeKind::Critical: return "Critical";
  }
  return "?";
}

RegimePrediction classify_regime(const MinStructure& s) {
  if (s.argmin_set.empty() || s.argmin_set.total_length() <= 0.0)
    throw std::invalid_argument("classify_regime: minimum set must have positive length");
  if (!(s.alpha_star > 0.0 && s.alpha_star < 1.0))
    throw std::invalid_argument("classify_regime: alpha_star must lie in (0,1)");
  RegimePrediction p;
  p.target_set = s.argmin_set;
  if (s.bounded) {
    p.condition_lhs = 2.0 * s.alpha_star;
  } else {
    if (!s.growth)
      throw std::invalid_argument(
          "classify_regime: unbounded minimum set requires growth exponents");
    const auto& g = *s.growth;
    if (!(g.c1 < 1.0 && g.c1 >= g.c2 && g.c2 >= 0.0))
      throw std::invalid_argument("classify_regime: need 1 > c1 >= c2 >= 0");
    p.condition_lhs = 2.0 * s.alpha_star / (1.0 + g.c1);
  }
  p.condition_rhs = std::min(s.alpha_left, s.alpha_right);
  if (p.condition_lhs < p.condition_rhs) {
    p.kind = (s.bounded && s.min_attained_by_jump)
                 ? RegimeKind::LocalizeProbability
                 : RegimeKind::LocalizeOccupation;
  } else if (p.condition_lhs > p.condition_rhs) {
    p.kind = RegimeKind::Delocalize;
  } else {
    p.kind = RegimeKind::Critical;
  }
  return p;
}

AlphaField AlphaField::constant(double value, FieldLimits limits) {
  check_order_value(value, limits);
  AlphaField f;
  f.kind_ = Kind::Piecewise;
  f.tail_left_ = f.tail_right_ = value;
  f.alpha_star_ = value;
  // constant field: the whole line is the minimum set, but there is no
  // complement to compare against, so no regime structure
  return f;
}

AlphaField AlphaField::piecewise_constant(std::vector<double> breakpoints,
                                          std::vector<double> values,
                                          double tail_left, double tail_right,
                                          FieldLimits limits) {
  if (breakpoints.empty())
    throw std::invalid_argument("piecewise field: need at least one breakpoint");
  if (values.size() + 1 != breakpoints.size())
    throw std::invalid_argument("piecewise field: need values.size() == breakpoints.size()-1");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()) ||
      std::adjacent_find(breakpoints.begin(), breakpoints.end()) != breakpoints.end())
    throw std::invalid_argument("piecewise field: breakpoints must be strictly ascending");
  for (double b : breakpoints)
    if (!std::isfinite(b))
      throw std::invalid_argument("piecewise field: breakpoints must be finite");
  check_order_value(tail_left, limits);
  check_order_value(tail_right, limits);
  for (double v : values) check_order_value(v, limits);

  AlphaField f;
  f.kind_ = Kind::Piecewise;
  f.breaks_ = std::move(breakpoints);
  f.values_ = std::move(values);
  f.tail_left_ = tail_left;
  f.tail_right_ = tail_right;
  f.derive_piecewise_structure();
  return f;
}

AlphaField AlphaField::two_level(double alpha_in, double alpha_out, double lo,
                                 double hi, FieldLimits limits) {
  return piecewise_constant({lo, hi}, {alpha_in}, alpha_out, alpha_out, limits);
}

AlphaField AlphaField::lattice(double alpha_min, double alpha_out, double c,
                               double extent, FieldLimits limits) {
  if (!(c > 0.0 && c < 1.0))
    throw std::invalid_argument("lattice field: growth exponent must lie in (0,1)");
  if (!(extent >= 4.0))
    throw std::invalid_argument("lattice field: extent must be >= 4");
  IntervalUnion cells;
  for (int n = 0;; ++n) {
    const double lo = std::pow(static_cast<double>(n), 1.0 / c);
    if (lo > extent) break;
    cells.add(lo, lo + 1.0);
    cells.add(-(lo + 1.0), -lo);
  }
  std::vector<double> breaks;
  std::vector<double> vals;
  const auto& parts = cells.parts();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    breaks.push_back(parts[i].lo);
    vals.push_back(alpha_min);
    breaks.push_back(parts[i].hi);
    if (i + 1 < parts.size()) vals.push_back(alpha_out);
  }
  AlphaField f = piecewise_constant(std::move(breaks), std::move(vals),
                                    alpha_out, alpha_out, limits);
  // Override the derived (bounded) structure with the declared ideal set.
  MinStructure s;
  s.alpha_star = alpha_min;
  s.argmin_set = cells;
  s.alpha_left = s.alpha_right = alpha_out;
  s.bounded = false;
  s.growth = GrowthExponents{c, c, 1.0, 1.0};
  s.min_attained_by_jump = true;
  f.structure_ = std::move(s);
  return f;
}

AlphaField AlphaField::smooth(std::function<double(double)> fn, double alpha_star,
                              double tail_left, double tail_right, double hull,
                              std::optional<MinStructure> structure,
                              FieldLimits limits) {
  if (!fn) throw std::invalid_argument("smooth field: callable required");
  if (!(hull > 0.0) || !std::isfinite(hull))
    throw std::invalid_argument("smooth field: hull must be positive and finite");
  AlphaField f;
  f.kind_ = Kind::Smooth;
  f.fn_ = std::move(fn);
  f.hull_ = hull;
  f.tail_left_ = tail_left;
  f.tail_right_ = tail_right;
  f.alpha_star_ = alpha_star;

  // Verify declared data by sampling: range band, tail flats, minimum value.
  const int n = 4096;
  double seen_min = kInf;
  for (int i = 0; i <= n; ++i) {
    const double x = -hull + 2.0 * hull * i / n;
    const double a = f.fn_(x);
    check_order_value(a, limits);
    seen_min = std::min(seen_min, a);
  }
  for (double d : {1e-3, 1.0, 100.0}) {
    if (std::fabs(f.fn_(hull + d) - tail_right) > 1e-9 ||
        std::fabs(f.fn_(-hull - d) - tail_left) > 1e-9)
      throw std::invalid_argument("smooth field: callable does not match declared tails beyond hull");
  }
  if (seen_min < alpha_star - 1e-7)
    throw std::invalid_argument("smooth field: sampled values undercut declared alpha_star");
  if (structure) {
    if (structure->alpha_star != alpha_star)
      throw std::invalid_argument("smooth field: structure alpha_star mismatch");
    for (const auto& p : structure->argmin_set.parts()) {
      const double mid = 0.5 * (p.lo + p.hi);
      if (std::fabs(f.fn_(mid) - alpha_star) > 1e-7)
        throw std::invalid_argument("smooth field: declared minimum set not attained");
    }
    f.structure_ = std::move(structure);
  }
  return f;
}

AlphaField AlphaField::vee(double alpha_min, double alpha_tail,
                           double half_width, FieldLimits limits) {
  if (!(half_width > 0.0))
    throw std::invalid_argument("vee field: half_width must be positive");
  const double rise = alpha_tail - alpha_min;
  if (rise <= 0.0)
    throw std::invalid_argument("vee field: need alpha_min < alpha_tail");
  auto fn = [alpha_min, rise, half_width](double x) {
    return alpha_min + rise * std::min(std::fabs(x) / half_width, 1.0);
  };
  return smooth(std::move(fn), alpha_min, alpha_tail, alpha_tail, half_width,
                std::nullopt, limits);
}

AlphaField AlphaField::tabulated(std::vector<double> grid,
                                 std::vector<double> values,
                                 FieldLimits limits) {
  if (grid.size() < 2 || grid.size() != values.size())
    throw std::invalid_argument("tabulated field: need matching grid/values, size >= 2");
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw std::invalid_argument("tabulated field: grid must be strictly ascending");
  for (double v : values) check_order_value(v, limits);

  AlphaField f;
  f.kind_ = Kind::Tabulated;
  f.breaks_ = std::move(grid);
  f.values_ = std::move(values);
  f.tail_left_ = f.values_.front();
  f.tail_right_ = f.values_.back();
  f.hull_ = std::max(std::fabs(f.breaks_.front()), std::fabs(f.breaks_.back()));
  f.alpha_star_ = *std::min_element(f.values_.begin(), f.values_.end());

  // Linear interpolation attains its minimum at nodes; a usable minimum set
  // needs a plateau of consecutive minimal nodes strictly inside the grid,
  // below both edge values.
  IntervalUnion plateau;
  const std::size_t m = f.values_.size();
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (f.values_[i] == f.alpha_star_ && f.values_[i + 1] == f.alpha_star_)
      plateau.add(f.breaks_[i], f.breaks_[i + 1]);
  }
  if (!plateau.empty() && f.tail_left_ > f.alpha_star_ &&
      f.tail_right_ > f.alpha_star_) {
    MinStructure s;
    s.alpha_star = f.alpha_star_;
    s.argmin_set = plateau;
    s.alpha_left = f.tail_left_;
    s.alpha_right = f.tail_right_;
    s.bounded = true;
    s.min_attained_by_jump = false;  // linear approach, not a jump
    f.structure_ = std::move(s);
  }
  return f;
}

double AlphaField::eval_piecewise_large(double x) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
  return i == breaks_.size() ? tail_right_ : values_[i - 1];
}

double AlphaField::eval_slow(double x) const {
  if (kind_ == Kind::Smooth) {
    if (x < -hull_) return tail_left_;
    if (x > hull_) return tail_right_;
    return fn_(x);
  }
  // tabulated
  if (x <= breaks_.front()) return tail_left_;
  if (x >= breaks_.back()) return tail_right_;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
  const double x0 = breaks_[i - 1], x1 = breaks_[i];
  const double w = (x - x0) / (x1 - x0);
  return values_[i - 1] * (1.0 - w) + values_[i] * w;
}

void AlphaField::derive_piecewise_structure() {
  double amin = std::min(tail_left_, tail_right_);
  for (double v : values_) amin = std::min(amin, v);
  alpha_star_ = amin;
  if (tail_left_ == amin || tail_right_ == amin) return;  // minimum not interior

  MinStructure s;
  s.alpha_star = amin;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] == amin) s.argmin_set.add(breaks_[i], breaks_[i + 1]);
  s.alpha_left = tail_left_;
  s.alpha_right = tail_right_;
  s.bounded = true;
  s.min_attained_by_jump = true;  // piecewise constant jumps at cell edges
  structure_ = std::move(s);
}

const MinStructure& AlphaField::structure() const {
  if (!structure_)
    throw std::logic_error(
        "alpha field: no usable minimum structure (minimum sits in the tails "
        "or on a zero-length set)");
  return *structure_;
}

IntervalUnion AlphaField::level_set(double beta) const {
  if (!(beta > 0.0))
    throw std::domain_error("level_set: beta must be positive");
  const double c = alpha_star_ + beta;
  if (c >= 1.0)
    throw std::domain_error("level_set: alpha_star + beta must stay below 1");

  IntervalUnion out;
  if (kind_ == Kind::Piecewise) {
    if (breaks_.empty()) {
      // constant field: either everything or nothing
      if (tail_left_ < c) return IntervalUnion::whole_line();
      return out;
    }
    if (tail_left_ < c) out.add(-kInf, breaks_.front());
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i] < c) out.add(breaks_[i], breaks_[i + 1]);
    if (tail_right_ < c) out.add(breaks_.back(), kInf);
    return out;
  }

  if (kind_ == Kind::Tabulated) {
    // exact on each linear segment
    if (tail_left_ < c) out.add(-kInf, breaks_.front());
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
      const double x0 = breaks_[i], x1 = breaks_[i + 1];
      const double a0 = values_[i], a1 = values_[i + 1];
      if (a0 < c && a1 < c) {
        out.add(x0, x1);
      } else if (a0 < c || a1 < c) {
        const double xc = x0 + (c - a0) / (a1 - a0) * (x1 - x0);
        if (a0 < c)
          out.add(x0, xc);
        else
          out.add(xc, x1);
      }
    }
    if (tail_right_ < c) out.add(breaks_.back(), kInf);
    return out;
  }

  // smooth: dense scan over the hull plus bisection refinement of crossings
  const int n = 1 << 14;
  const double lo = -hull_, hi = hull_;
  auto below = [&](double x) { return (*this)(x) < c; };
  if (tail_left_ < c) out.add(-kInf, lo);
  double prev_x = lo;
  bool prev_in = below(lo);
  double open_at = prev_in ? lo : 0.0;
  for (int i = 1; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const bool in = below(x);
    if (in != prev_in) {
      // refine the crossing to ~1e-12
      double a = prev_x, b = x;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (a + b);
        if (below(mid) == prev_in)
          a = mid;
        else
          b = mid;
        if (b - a < 1e-12) break;
      }
      const double xc = 0.5 * (a + b);
      if (prev_in)
        out.add(open_at, xc);
      else
        open_at = xc;
    }
    prev_in = in;
    prev_x = x;
  }
  if (prev_in) out.add(open_at, hi);
  if (tail_right_ < c) out.add(hi, kInf);
  return out;
}

double AlphaField::levy_tail(double s, double x) const {
  if (!(s > 0.0)) throw std::domain_error("levy_tail: s must be positive");
  const double a = (*this)(x);
  return std::pow(s, -a) / std::tgamma(1.0 - a);
}

std::vector<double> AlphaField::orders_at(const std::vector<double>& xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back((*this)(x));
  return out;
}

}  // namespace varalpha
