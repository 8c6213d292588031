#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tentlab {

/// Closed interval [lo, hi] on the real line.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  bool contains(const Interval& o) const noexcept { return lo <= o.lo && o.hi <= hi; }
  double width() const noexcept { return hi - lo; }
};

enum class MapFamily { Tent, Bernoulli, ModifiedTent, Generalized };

/// Implementation-error model for a map. The slope of each segment is
/// scaled by (1 + slope_error) about that segment's left breakpoint value,
/// then `offset` is added, then the optional output clamp applies.
/// Breakpoints never move.
struct NonidealParams {
  double slope_error = 0.0;            ///< must be > -1
  double offset = 0.0;                 ///< additive output error
  std::optional<Interval> saturation;  ///< output clamp interval
  bool saturation_clips = false;       ///< acknowledge a clamp narrower than the map domain
};

/// Selector for every map in scope. Construct through the factories; they
/// validate parameters. `modified_tent()` evaluates identically to
/// `generalized(-2)` but keeps its own tag (its canonical breakpoint list
/// includes the origin).
class MapKind {
 public:
  static MapKind tent();
  static MapKind bernoulli();
  static MapKind modified_tent();
  /// Slope-m family member. m must be nonzero and finite; unless
  /// `escape_study` is set it must also lie in the confined range (-3, 3).
  static MapKind generalized(double m, bool escape_study = false);

  /// Copy of this map with implementation errors applied.
  MapKind perturbed(const NonidealParams& params) const;

  MapFamily family() const noexcept { return family_; }
  /// Signed slope parameter: 2 for tent/Bernoulli, -2 for the modified
  /// tent, m for the generalized family. |slope| is the derivative
  /// magnitude of every segment.
  double slope() const noexcept { return m_; }
  Interval domain() const noexcept;
  bool is_perturbed() const noexcept { return nonideal_.has_value(); }
  const NonidealParams& nonideal() const { return *nonideal_; }
  std::string describe() const;

 private:
  MapKind(MapFamily f, double m) : family_(f), m_(m) {}

  MapFamily family_;
  double m_;
  std::optional<NonidealParams> nonideal_;
};

/// Tent map on [0,1]: 2x for x <= 1/2, else 2(1-x).
double eval_tent(double x);

/// Doubling map on [0,1): 2x for x < 1/2, else 2x-1. Discontinuous at 1/2.
double eval_bernoulli(double x);

/// Slope-m family on [-1,1]:
///   -m(x + 2/|m|)  for x <= -1/|m|
///   m x            for |x| < 1/|m|
///   -m(x - 2/|m|)  for x >= 1/|m|
/// For |m| <= 3 the image stays inside [-1,1].
double eval_generalized(double m, double x);

/// Sign-alternating tent map on [-1,1]; identical to eval_generalized(-2, x).
double eval_modified_tent(double x);

/// |slope| of the segment containing x (the magnitude is the same on every
/// segment of any map in this family; perturbed kinds scale it by
/// 1 + slope_error). Saturation flats are ignored.
double derivative_magnitude(const MapKind& kind, double x);

/// Breakpoint/segment representation. value(x) = slopes[i]*x + intercepts[i]
/// on segment i, which covers [breakpoints[i], breakpoints[i+1]) -- left
/// closed, except the last segment which is closed on both ends.
/// `output_clamp` is only set for perturbed kinds with saturation.
struct PiecewiseAffineMap {
  Interval domain;
  std::vector<double> breakpoints;  ///< strictly increasing, spans the domain
  std::vector<double> slopes;       ///< one per adjacent breakpoint pair
  std::vector<double> intercepts;
  bool continuous = true;
  std::optional<Interval> output_clamp;

  std::size_t segment_count() const noexcept { return slopes.size(); }
  /// Index of the segment owning x. Out-of-domain x selects the adjacent
  /// outer segment when `extrapolate` is set and throws otherwise.
  std::size_t segment_of(double x, bool extrapolate = false) const;
  double value_at(double x, bool extrapolate = false) const;
};

PiecewiseAffineMap build_piecewise(const MapKind& kind);
double eval_piecewise(const PiecewiseAffineMap& map, double x, bool extrapolate = false);

namespace detail {
// Branch formulas without domain validation; outer branches extend affinely.
double tent_raw(double x) noexcept;
double bernoulli_raw(double x) noexcept;
double generalized_raw(double m, double x) noexcept;
}  // namespace detail

}  // namespace tentlab
