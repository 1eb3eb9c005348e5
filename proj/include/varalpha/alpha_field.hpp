#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "varalpha/intervals.hpp"

namespace varalpha {

// Guard band for admissible order values. Orders must always lie strictly in
// (0,1); on top of that, construction rejects fields leaving [min_allowed,
// max_allowed] unless the caller widens the band on purpose (very small or
// very large orders make step sizes and kernel constants explode).
struct FieldLimits {
  double min_allowed = 0.05;
  double max_allowed = 0.95;
};

// Measure growth of an unbounded minimum set:
//   |A intersect [0,x]|  ~ a1 * x^c1,   |A intersect [-x,0]| ~ a2 * x^c2,
// with 1 > c1 >= c2 >= 0.
struct GrowthExponents {
  double c1 = 0.0;
  double c2 = 0.0;
  double a1 = 1.0;
  double a2 = 1.0;
};

// Where and how the order attains its minimum. alpha_left / alpha_right are
// the order limits along the complement of the minimum set at -inf / +inf.
// `min_attained_by_jump` records that the order jumps at the boundary of the
// minimum set, i.e. the minimum set coincides with every small sublevel set.
struct MinStructure {
  double alpha_star = 0.0;
  IntervalUnion argmin_set;
  double alpha_left = 0.0;
  double alpha_right = 0.0;
  bool bounded = true;
  std::optional<GrowthExponents> growth;
  bool min_attained_by_jump = false;
};

enum class RegimeKind { LocalizeOccupation, LocalizeProbability, Delocalize, Critical };

const char* to_string(RegimeKind k);

// Outcome of the dichotomy test. For bounded minimum sets the comparison is
//       2 * alpha_star   vs   min(alpha_left, alpha_right);
// for unbounded sets with growth exponent c1 it is
//   2 * alpha_star / (1 + c1)   vs   min(alpha_left, alpha_right).
// Strictly smaller left side localizes, strictly larger delocalizes, exact
// equality is Critical (no prediction). Probability localization is claimed
// only for bounded minimum sets attained by a jump.
struct RegimePrediction {
  RegimeKind kind = RegimeKind::Critical;
  IntervalUnion target_set;
  double condition_lhs = 0.0;
  double condition_rhs = 0.0;
};

RegimePrediction classify_regime(const MinStructure& s);

// Spatially varying stability order alpha: R -> (0,1). Three variants:
// piecewise constant (right-continuous), smooth parametric (callable with
// declared structure), and tabulated (linear interpolation). All variants
// have constant tails outside a bounded hull.
class AlphaField {
 public:
  static AlphaField constant(double value, FieldLimits limits = {});

  // values[i] applies on [breakpoints[i], breakpoints[i+1]); tail_left on
  // (-inf, breakpoints.front()); tail_right on [breakpoints.back(), inf).
  static AlphaField piecewise_constant(std::vector<double> breakpoints,
                                       std::vector<double> values,
                                       double tail_left, double tail_right,
                                       FieldLimits limits = {});

  // alpha_in on [lo,hi), alpha_out elsewhere.
  static AlphaField two_level(double alpha_in, double alpha_out, double lo,
                              double hi, FieldLimits limits = {});

  // Symmetric lattice of unit intervals [n^(1/c), n^(1/c)+1] on both half
  // lines, alpha_min on the lattice and alpha_out off it, realized with
  // finitely many breakpoints out to |x| <= extent (tail value beyond). The
  // attached structure declares the ideal unbounded set with growth
  // exponents c1 = c2 = c, a1 = a2 = 1.
  static AlphaField lattice(double alpha_min, double alpha_out, double c,
                            double extent, FieldLimits limits = {});

  // Callable variant. `hull` is the radius beyond which fn must equal its
  // tail values exactly; `structure` may be empty when the minimum set is
  // degenerate (evaluation and level sets still work). Declared data is
  // verified by sampling at construction.
  static AlphaField smooth(std::function<double(double)> fn, double alpha_star,
                           double tail_left, double tail_right, double hull,
                           std::optional<MinStructure> structure = {},
                           FieldLimits limits = {});

  // V-shaped profile alpha(x) = alpha_min + (alpha_tail-alpha_min) *
  // min(|x|/half_width, 1); minimum attained at the single point 0, so no
  // regime structure is attached.
  static AlphaField vee(double alpha_min, double alpha_tail,
                        double half_width = 1.0, FieldLimits limits = {});

  // Linear interpolation through (grid[i], values[i]); edge values extend as
  // constant tails.
  static AlphaField tabulated(std::vector<double> grid,
                              std::vector<double> values,
                              FieldLimits limits = {});

  double operator()(double x) const {
    if (kind_ == Kind::Piecewise) {
      const std::size_t m = breaks_.size();
      if (m == 0 || x < breaks_[0]) return tail_left_;
      if (m <= 8) {
        std::size_t i = 1;
        while (i < m && x >= breaks_[i]) ++i;
        return i == m ? tail_right_ : values_[i - 1];
      }
      return eval_piecewise_large(x);
    }
    return eval_slow(x);
  }

  double alpha_star() const { return alpha_star_; }
  double tail_left() const { return tail_left_; }
  double tail_right() const { return tail_right_; }

  bool has_structure() const { return structure_.has_value(); }
  // Throws std::logic_error when the field has no usable minimum structure
  // (minimum attained only in the tails or on a zero-length set).
  const MinStructure& structure() const;

  // Sublevel set {x : alpha(x) < alpha_star + beta}. Exact for piecewise
  // fields; bisection to endpoint tolerance 1e-9 otherwise. Requires
  // alpha_star + beta < 1.
  IntervalUnion level_set(double beta) const;

  // Tail of the jump kernel at spatial point x: s^(-alpha(x)) / Gamma(1 -
  // alpha(x)); requires s > 0.
  double levy_tail(double s, double x) const;

  // Orders sampled at the given points (used by the grid solver).
  std::vector<double> orders_at(const std::vector<double>& xs) const;

 private:
  enum class Kind { Piecewise, Smooth, Tabulated };

  AlphaField() = default;
  double eval_piecewise_large(double x) const;
  double eval_slow(double x) const;
  void derive_piecewise_structure();

  Kind kind_ = Kind::Piecewise;
  std::vector<double> breaks_;
  std::vector<double> values_;   // piecewise: cell values; tabulated: node values
  double tail_left_ = 0.5;
  double tail_right_ = 0.5;
  std::function<double(double)> fn_;
  double hull_ = 0.0;
  double alpha_star_ = 0.5;
  std::optional<MinStructure> structure_;
};

}  // namespace varalpha
