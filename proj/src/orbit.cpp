#include "tentlab/orbit.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tentlab {

OrbitStepper::OrbitStepper(const MapKind& kind, const OrbitConfig& cfg)
    : family_(kind.family()),
      m_(kind.slope()),
      perturbed_(kind.is_perturbed()),
      domain_(kind.domain()),
      policy_(cfg.escape_policy),
      dither_(cfg.dither_amplitude),
      rng_(cfg.rng_seed),
      x_(cfg.x0) {
  if (!(dither_ >= 0.0) || dither_ >= kMaxDither)
    throw std::invalid_argument("dither_amplitude must lie in [0, 1e-3)");
  if (!std::isfinite(cfg.x0)) throw std::invalid_argument("x0 must be finite");
  if (policy_ == EscapePolicy::HaltOnEscape && !domain_.contains(cfg.x0)) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "x0 = %.17g outside the map domain [%g, %g]", cfg.x0,
                  domain_.lo, domain_.hi);
    throw std::domain_error(buf);
  }
  if (perturbed_) pmap_ = build_piecewise(kind);
  inv_ = 1.0 / std::abs(m_);
  shift_ = m_ > 0.0 ? 2.0 : -2.0;
}

double OrbitStepper::raw_eval(double x) const {
  if (perturbed_) return pmap_.value_at(x, /*extrapolate=*/true);
  switch (family_) {
    case MapFamily::Tent:
      return detail::tent_raw(x);
    case MapFamily::Bernoulli:
      return detail::bernoulli_raw(x);
    default:
      if (x <= -inv_) return -m_ * x - shift_;
      if (x >= inv_) return -m_ * x + shift_;
      return m_ * x;
  }
}

bool OrbitStepper::step() {
  const double raw = raw_eval(x_);
  ++step_;
  if (raw < domain_.lo || raw > domain_.hi) {
    if (!escaped_at_) escaped_at_ = step_;
    x_ = raw;  // recorded verbatim; dither and reflection apply in-domain only
    return policy_ == EscapePolicy::Extrapolate;
  }
  double x = raw;
  if (dither_ > 0.0) {
    x += rng_.next_symmetric(dither_);
    if (x > domain_.hi)
      x = 2.0 * domain_.hi - x;
    else if (x < domain_.lo)
      x = 2.0 * domain_.lo - x;
  } else if (x == 0.0 && !absorbed_at_zero_) {
    absorbed_at_zero_ = step_;
  }
  x_ = x;
  return true;
}

OrbitResult iterate_orbit(const MapKind& kind, const OrbitConfig& cfg) {
  OrbitStepper stepper(kind, cfg);
  OrbitResult out;
  out.states.reserve(cfg.n_steps);
  while (stepper.steps_taken() < cfg.n_steps) {
    const bool cont = stepper.step();
    out.states.push_back(stepper.state());
    if (!cont) break;
  }
  out.escaped_at = stepper.escaped_at();
  out.absorbed_at_zero = stepper.absorbed_at_zero();
  return out;
}

}  // namespace tentlab
