#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tentlab/maps.hpp"
#include "tentlab/rng.hpp"

namespace tentlab {

/// Default dither half-width: small enough not to disturb the dynamics,
/// large enough to keep slope-2 maps off the dyadic absorption path.
inline constexpr double kDefaultDither = 0x1.0p-40;

/// Dither amplitudes at or above this would swamp the map dynamics.
inline constexpr double kMaxDither = 1e-3;

enum class EscapePolicy {
  HaltOnEscape,  ///< stop when the undithered map value leaves the domain
  Extrapolate,   ///< keep iterating on affinely extended outer segments
};

struct OrbitConfig {
  double x0 = 0.1;
  std::size_t n_steps = 1000;
  /// Uniform(-a, a) noise added after each map evaluation; 0 disables.
  double dither_amplitude = kDefaultDither;
  std::uint64_t rng_seed = 1;
  EscapePolicy escape_policy = EscapePolicy::HaltOnEscape;
};

/// Trajectory x_1..x_n. Step numbers are 1-based: states[k-1] is the state
/// after step k. Under halt-on-escape the escaping value is the last entry.
struct OrbitResult {
  std::vector<double> states;
  std::optional<std::size_t> escaped_at;        ///< first step whose undithered value left the domain
  std::optional<std::size_t> absorbed_at_zero;  ///< first step with state exactly 0 (zero dither only)
};

/// Streaming orbit iterator: one map evaluation, one dither draw and at most
/// one boundary reflection per step, O(1) memory.
///
/// Step semantics: x' = M(x) + eps with eps ~ Uniform(-a, a) from the seeded
/// generator. If M(x) itself leaves the domain the step counts as an escape
/// (dither is not consulted); otherwise a dithered value beyond a boundary
/// is reflected back across it (x > hi becomes 2 hi - x). Identical
/// (kind, config) inputs replay bit-identically.
class OrbitStepper {
 public:
  OrbitStepper(const MapKind& kind, const OrbitConfig& cfg);

  /// Advances one step and records it. Returns false when iteration must
  /// stop (escape under halt-on-escape); the escaping value is still stored
  /// as the current state.
  bool step();

  double state() const noexcept { return x_; }
  std::size_t steps_taken() const noexcept { return step_; }
  bool escaped() const noexcept { return escaped_at_.has_value(); }
  std::optional<std::size_t> escaped_at() const noexcept { return escaped_at_; }
  std::optional<std::size_t> absorbed_at_zero() const noexcept { return absorbed_at_zero_; }
  const Interval& domain() const noexcept { return domain_; }

 private:
  double raw_eval(double x) const;

  MapFamily family_;
  double m_;
  double inv_ = 0.0;    // 1/|m|
  double shift_ = 0.0;  // 2 sign(m)
  bool perturbed_;
  PiecewiseAffineMap pmap_;  // populated for perturbed kinds only
  Interval domain_;
  EscapePolicy policy_;
  double dither_;
  SplitMix64 rng_;
  double x_;
  std::size_t step_ = 0;
  std::optional<std::size_t> escaped_at_;
  std::optional<std::size_t> absorbed_at_zero_;
};

OrbitResult iterate_orbit(const MapKind& kind, const OrbitConfig& cfg);

}  // namespace tentlab
