#include "tentlab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tentlab {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void throw_out_of_domain(const char* what, double x, const Interval& d) {
  throw std::domain_error(std::string(what) + ": x = " + fmt(x) + " outside [" + fmt(d.lo) +
                          ", " + fmt(d.hi) + "]");
}

}  // namespace

namespace detail {

double tent_raw(double x) noexcept { return x <= 0.5 ? 2.0 * x : 2.0 * (1.0 - x); }

double bernoulli_raw(double x) noexcept { return x < 0.5 ? 2.0 * x : 2.0 * x - 1.0; }

double generalized_raw(double m, double x) noexcept {
  // Outer branches in expanded form: -m(x -+ 2/|m|) = -m x +- 2 sign(m).
  // The +-2 intercepts are exact, which keeps this in lockstep with the
  // breakpoint representation and preserves the slope-2 exactness.
  const double inner = 1.0 / std::abs(m);
  const double shift = m > 0.0 ? 2.0 : -2.0;
  if (x <= -inner) return -m * x - shift;
  if (x >= inner) return -m * x + shift;
  return m * x;
}

}  // namespace detail

double eval_tent(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw_out_of_domain("tent map", x, {0.0, 1.0});
  return detail::tent_raw(x);
}

double eval_bernoulli(double x) {
  if (!(x >= 0.0 && x < 1.0)) throw_out_of_domain("bernoulli map", x, {0.0, 1.0});
  return detail::bernoulli_raw(x);
}

double eval_generalized(double m, double x) {
  if (m == 0.0 || !std::isfinite(m))
    throw std::invalid_argument("generalized map: slope must be nonzero and finite, got " + fmt(m));
  if (!(x >= -1.0 && x <= 1.0)) throw_out_of_domain("generalized map", x, {-1.0, 1.0});
  return detail::generalized_raw(m, x);
}

double eval_modified_tent(double x) {
  if (!(x >= -1.0 && x <= 1.0)) throw_out_of_domain("modified tent map", x, {-1.0, 1.0});
  return detail::generalized_raw(-2.0, x);
}

MapKind MapKind::tent() { return {MapFamily::Tent, 2.0}; }

MapKind MapKind::bernoulli() { return {MapFamily::Bernoulli, 2.0}; }

MapKind MapKind::modified_tent() { return {MapFamily::ModifiedTent, -2.0}; }

MapKind MapKind::generalized(double m, bool escape_study) {
  if (m == 0.0 || !std::isfinite(m))
    throw std::invalid_argument("generalized map: slope must be nonzero and finite, got " + fmt(m));
  if (!(std::abs(m) < 3.0) && !escape_study)
    throw std::invalid_argument("generalized map: slope " + fmt(m) +
                                " outside (-3, 3); enable escape_study to accept it");
  return {MapFamily::Generalized, m};
}

MapKind MapKind::perturbed(const NonidealParams& params) const {
  if (is_perturbed()) throw std::invalid_argument("map is already perturbed");
  if (!(params.slope_error > -1.0) || !std::isfinite(params.slope_error))
    throw std::invalid_argument("slope_error must be finite and > -1, got " + fmt(params.slope_error));
  if (!std::isfinite(params.offset))
    throw std::invalid_argument("offset must be finite, got " + fmt(params.offset));
  if (params.saturation) {
    if (!(params.saturation->lo < params.saturation->hi))
      throw std::invalid_argument("saturation interval is empty");
    if (!params.saturation->contains(domain()) && !params.saturation_clips)
      throw std::invalid_argument(
          "saturation interval clips the map domain; set saturation_clips to acknowledge");
  }
  MapKind out = *this;
  out.nonideal_ = params;
  return out;
}

Interval MapKind::domain() const noexcept {
  switch (family_) {
    case MapFamily::Tent:
    case MapFamily::Bernoulli:
      return {0.0, 1.0};
    default:
      return {-1.0, 1.0};
  }
}

std::string MapKind::describe() const {
  std::string s;
  switch (family_) {
    case MapFamily::Tent: s = "tent"; break;
    case MapFamily::Bernoulli: s = "bernoulli"; break;
    case MapFamily::ModifiedTent: s = "modtent"; break;
    case MapFamily::Generalized: s = "gen:" + fmt(m_); break;
  }
  if (nonideal_) {
    s += " [slope_error=" + fmt(nonideal_->slope_error) + " offset=" + fmt(nonideal_->offset);
    if (nonideal_->saturation)
      s += " saturation=[" + fmt(nonideal_->saturation->lo) + "," + fmt(nonideal_->saturation->hi) + "]";
    s += "]";
  }
  return s;
}

double derivative_magnitude(const MapKind& kind, double x) {
  const Interval d = kind.domain();
  if (!(x >= d.lo && x <= d.hi)) throw_out_of_domain("derivative_magnitude", x, d);
  double mag = std::abs(kind.slope());
  if (kind.is_perturbed()) mag *= 1.0 + kind.nonideal().slope_error;
  return mag;
}

std::size_t PiecewiseAffineMap::segment_of(double x, bool extrapolate) const {
  if (std::isnan(x)) throw std::domain_error("piecewise map: x is NaN");
  if (x < breakpoints.front()) {
    if (!extrapolate) throw_out_of_domain("piecewise map", x, domain);
    return 0;
  }
  if (x >= breakpoints.back()) {
    if (x > breakpoints.back() && !extrapolate) throw_out_of_domain("piecewise map", x, domain);
    return segment_count() - 1;
  }
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return static_cast<std::size_t>(it - breakpoints.begin()) - 1;
}

double PiecewiseAffineMap::value_at(double x, bool extrapolate) const {
  const std::size_t i = segment_of(x, extrapolate);
  double v = slopes[i] * x + intercepts[i];
  if (output_clamp) v = std::clamp(v, output_clamp->lo, output_clamp->hi);
  return v;
}

double eval_piecewise(const PiecewiseAffineMap& map, double x, bool extrapolate) {
  return map.value_at(x, extrapolate);
}

namespace {

PiecewiseAffineMap build_base(const MapKind& kind) {
  PiecewiseAffineMap map;
  const double m = kind.slope();
  switch (kind.family()) {
    case MapFamily::Tent:
      map.domain = {0.0, 1.0};
      map.breakpoints = {0.0, 0.5, 1.0};
      map.slopes = {2.0, -2.0};
      map.intercepts = {0.0, 2.0};
      break;
    case MapFamily::Bernoulli:
      map.domain = {0.0, 1.0};
      map.breakpoints = {0.0, 0.5, 1.0};
      map.slopes = {2.0, 2.0};
      map.intercepts = {0.0, -1.0};
      map.continuous = false;  // jump at 1/2
      break;
    case MapFamily::ModifiedTent:
      // The origin stays in the breakpoint list: it is the boundary of the
      // sign partition even though the two middle segments are collinear.
      map.domain = {-1.0, 1.0};
      map.breakpoints = {-1.0, -0.5, 0.0, 0.5, 1.0};
      map.slopes = {2.0, -2.0, -2.0, 2.0};
      map.intercepts = {2.0, 0.0, 0.0, -2.0};
      break;
    case MapFamily::Generalized: {
      map.domain = {-1.0, 1.0};
      const double inner = 1.0 / std::abs(m);
      const double sgn = m > 0.0 ? 1.0 : -1.0;
      if (inner < 1.0) {
        map.breakpoints = {-1.0, -inner, inner, 1.0};
        map.slopes = {-m, m, -m};
        map.intercepts = {-2.0 * sgn, 0.0, 2.0 * sgn};
      } else {
        // |m| <= 1: the fold points lie outside the domain.
        map.breakpoints = {-1.0, 1.0};
        map.slopes = {m};
        map.intercepts = {0.0};
      }
      break;
    }
  }
  return map;
}

}  // namespace

PiecewiseAffineMap build_piecewise(const MapKind& kind) {
  PiecewiseAffineMap map = build_base(kind);
  if (!kind.is_perturbed()) return map;

  const NonidealParams& p = kind.nonideal();
  const double scale = 1.0 + p.slope_error;
  std::vector<double> slopes(map.segment_count());
  std::vector<double> intercepts(map.segment_count());
  for (std::size_t i = 0; i < map.segment_count(); ++i) {
    const double b = map.breakpoints[i];
    const double v_left = map.slopes[i] * b + map.intercepts[i];
    slopes[i] = map.slopes[i] * scale;
    intercepts[i] = v_left - slopes[i] * b + p.offset;
  }
  map.slopes = std::move(slopes);
  map.intercepts = std::move(intercepts);

  // Scaling about the left breakpoint generally tears interior joints.
  bool continuous = map.continuous;
  for (std::size_t i = 0; i + 1 < map.segment_count() && continuous; ++i) {
    const double b = map.breakpoints[i + 1];
    continuous = map.slopes[i] * b + map.intercepts[i] ==
                 map.slopes[i + 1] * b + map.intercepts[i + 1];
  }
  map.continuous = continuous;
  map.output_clamp = p.saturation;
  return map;
}

}  // namespace tentlab
