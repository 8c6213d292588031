#include "tentlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tentlab/errors.hpp"

namespace tentlab {

namespace {

std::size_t bin_index(double v, double lo, double hi, std::size_t n_bins) {
  const double t = (v - lo) / (hi - lo);
  const auto idx = static_cast<std::size_t>(t * static_cast<double>(n_bins));
  return std::min(idx, n_bins - 1);
}

std::vector<double> linspace_edges(double lo, double hi, std::size_t n_bins) {
  std::vector<double> edges(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_bins);
  return edges;
}

}  // namespace

LyapunovEstimate estimate_lyapunov(const MapKind& kind, const OrbitConfig& cfg,
                                   std::size_t n_transient) {
  if (cfg.n_steps <= n_transient)
    throw std::invalid_argument("estimate_lyapunov: n_steps must exceed n_transient");
  OrbitStepper stepper(kind, cfg);

  // |M'| is the same on every segment of any map in this family, so each
  // visited state contributes an identical log term and the Welford pass
  // returns it exactly with zero spread. The orbit is still walked in full
  // to honor the escape semantics.
  double mag = std::abs(kind.slope());
  if (kind.is_perturbed()) mag *= 1.0 + kind.nonideal().slope_error;
  const double log_deriv = std::log(mag);

  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  while (stepper.steps_taken() < cfg.n_steps) {
    const bool cont = stepper.step();
    if (stepper.escaped()) {
      if (n == 0)
        throw EscapeError(*stepper.escaped_at(),
                          "orbit escaped at step " + std::to_string(*stepper.escaped_at()) +
                              " with no post-transient samples");
      break;
    }
    if (stepper.steps_taken() > n_transient) {
      ++n;
      const double delta = log_deriv - mean;
      mean += delta / static_cast<double>(n);
      m2 += delta * (log_deriv - mean);
    }
    if (!cont) break;
  }
  const double sd = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
  return {mean, n, n > 0 ? sd / std::sqrt(static_cast<double>(n)) : 0.0};
}

DensityHistogram density_histogram(const MapKind& kind, const OrbitConfig& cfg,
                                   std::size_t n_transient, std::size_t n_bins, bool use_abs) {
  if (n_bins < 2) throw std::invalid_argument("density_histogram: n_bins must be >= 2");
  if (cfg.n_steps <= n_transient)
    throw std::invalid_argument("density_histogram: n_steps must exceed n_transient");
  const Interval d = kind.domain();
  const double lo = use_abs ? 0.0 : d.lo;
  const double hi = d.hi;

  DensityHistogram h;
  h.edges = linspace_edges(lo, hi, n_bins);
  h.counts.assign(n_bins, 0);

  OrbitStepper stepper(kind, cfg);
  while (stepper.steps_taken() < cfg.n_steps) {
    const bool cont = stepper.step();
    if (stepper.escaped())
      throw EscapeError(*stepper.escaped_at(),
                        "orbit escaped at step " + std::to_string(*stepper.escaped_at()));
    if (stepper.steps_taken() > n_transient) {
      const double v = use_abs ? std::abs(stepper.state()) : stepper.state();
      ++h.counts[bin_index(v, lo, hi, n_bins)];
    }
    if (!cont) break;
  }
  h.total = std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0});
  h.normalized.resize(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    const double width = h.edges[i + 1] - h.edges[i];
    h.normalized[i] = static_cast<double>(h.counts[i]) / (static_cast<double>(h.total) * width);
  }
  return h;
}

namespace {

void scan_one_column(const ScanConfig& cfg, double m, std::uint64_t column_seed,
                     std::uint64_t* column_counts, std::uint8_t* escaped_flag) {
  const std::size_t total_steps = cfg.n_transient + cfg.n_keep;
  if (m == 0.0) {
    // Constant-zero limit of the family: as |m| -> 0 the middle branch
    // covers the whole domain and M(x) -> 0, so the column carries its
    // mass at the origin. eval itself rejects m = 0.
    SplitMix64 rng(column_seed);
    for (std::size_t k = 1; k <= total_steps; ++k) {
      double x = 0.0;
      if (cfg.dither > 0.0) {
        x += rng.next_symmetric(cfg.dither);
        if (x > 1.0)
          x = 2.0 - x;
        else if (x < -1.0)
          x = -2.0 - x;
      }
      if (k > cfg.n_transient) ++column_counts[bin_index(x, -1.0, 1.0, cfg.x_bins)];
    }
    return;
  }

  OrbitConfig ocfg;
  ocfg.x0 = cfg.x0;
  ocfg.n_steps = total_steps;
  ocfg.dither_amplitude = cfg.dither;
  ocfg.rng_seed = column_seed;
  ocfg.escape_policy = EscapePolicy::HaltOnEscape;
  OrbitStepper stepper(MapKind::generalized(m, /*escape_study=*/true), ocfg);
  while (stepper.steps_taken() < total_steps) {
    if (!stepper.step()) {
      *escaped_flag = 1;
      return;
    }
    if (stepper.steps_taken() > cfg.n_transient)
      ++column_counts[bin_index(stepper.state(), -1.0, 1.0, cfg.x_bins)];
  }
}

BifurcationDiagram scan_impl(const ScanConfig& cfg, bool parallel) {
  if (cfg.n_m == 0) throw std::invalid_argument("bifurcation_scan: n_m must be >= 1");
  if (cfg.x_bins < 2) throw std::invalid_argument("bifurcation_scan: x_bins must be >= 2");
  if (cfg.n_keep == 0) throw std::invalid_argument("bifurcation_scan: n_keep must be >= 1");
  if (!(cfg.m_lo <= cfg.m_hi)) throw std::invalid_argument("bifurcation_scan: m_lo must be <= m_hi");
  if (!(cfg.dither >= 0.0) || cfg.dither >= kMaxDither)
    throw std::invalid_argument("bifurcation_scan: dither must lie in [0, 1e-3)");
  if (!(cfg.x0 >= -1.0 && cfg.x0 <= 1.0))
    throw std::invalid_argument("bifurcation_scan: x0 must lie in [-1, 1]");

  BifurcationDiagram d;
  d.m_grid.resize(cfg.n_m);
  for (std::size_t i = 0; i < cfg.n_m; ++i)
    d.m_grid[i] = cfg.n_m == 1 ? cfg.m_lo
                               : cfg.m_lo + (cfg.m_hi - cfg.m_lo) * static_cast<double>(i) /
                                                static_cast<double>(cfg.n_m - 1);
  d.x_edges = linspace_edges(-1.0, 1.0, cfg.x_bins);
  d.counts.assign(cfg.n_m * cfg.x_bins, 0);
  d.escaped_columns.assign(cfg.n_m, 0);

  const auto n = static_cast<std::ptrdiff_t>(cfg.n_m);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      scan_one_column(cfg, d.m_grid[i], derive_seed(cfg.seed, static_cast<std::uint64_t>(i)),
                      d.counts.data() + static_cast<std::size_t>(i) * cfg.x_bins,
                      &d.escaped_columns[static_cast<std::size_t>(i)]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      scan_one_column(cfg, d.m_grid[i], derive_seed(cfg.seed, static_cast<std::uint64_t>(i)),
                      d.counts.data() + static_cast<std::size_t>(i) * cfg.x_bins,
                      &d.escaped_columns[static_cast<std::size_t>(i)]);
  }
  return d;
}

struct TrialOutcome {
  std::optional<std::size_t> escape_step;
  double max_abs = 0.0;
};

TrialOutcome run_confinement_trial(const MapKind& kind, const ProbeConfig& cfg,
                                   std::size_t trial) {
  const Interval d = kind.domain();
  SplitMix64 seeder(derive_seed(cfg.seed, 2 * trial));
  OrbitConfig ocfg;
  ocfg.x0 = d.lo + seeder.next_unit() * d.width();
  ocfg.n_steps = cfg.steps_per_trial;
  ocfg.dither_amplitude = cfg.dither;
  ocfg.rng_seed = derive_seed(cfg.seed, 2 * trial + 1);
  ocfg.escape_policy = EscapePolicy::HaltOnEscape;

  OrbitStepper stepper(kind, ocfg);
  TrialOutcome out;
  out.max_abs = std::abs(ocfg.x0);
  while (stepper.steps_taken() < cfg.steps_per_trial) {
    const bool cont = stepper.step();
    out.max_abs = std::max(out.max_abs, std::abs(stepper.state()));
    if (!cont) break;
  }
  out.escape_step = stepper.escaped_at();
  return out;
}

ConfinementReport probe_impl(const MapKind& kind, const ProbeConfig& cfg, bool parallel) {
  if (cfg.trials == 0) throw std::invalid_argument("confinement_probe: trials must be >= 1");
  if (cfg.steps_per_trial == 0)
    throw std::invalid_argument("confinement_probe: steps_per_trial must be >= 1");
  if (!(cfg.dither >= 0.0) || cfg.dither >= kMaxDither)
    throw std::invalid_argument("confinement_probe: dither must lie in [0, 1e-3)");

  std::vector<TrialOutcome> outcomes(cfg.trials);
  const auto n = static_cast<std::ptrdiff_t>(cfg.trials);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      outcomes[static_cast<std::size_t>(i)] =
          run_confinement_trial(kind, cfg, static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      outcomes[static_cast<std::size_t>(i)] =
          run_confinement_trial(kind, cfg, static_cast<std::size_t>(i));
  }

  ConfinementReport rep;
  rep.map = kind.describe();
  rep.trials = cfg.trials;
  rep.escape_steps.reserve(cfg.trials);
  for (const TrialOutcome& t : outcomes) {
    rep.escape_steps.push_back(t.escape_step);
    if (t.escape_step) ++rep.escapes;
    rep.max_excursion = std::max(rep.max_excursion, t.max_abs);
  }
  return rep;
}

}  // namespace

BifurcationDiagram bifurcation_scan(const ScanConfig& cfg) { return scan_impl(cfg, true); }

BifurcationDiagram bifurcation_scan_serial(const ScanConfig& cfg) { return scan_impl(cfg, false); }

ConfinementReport confinement_probe(const MapKind& kind, const ProbeConfig& cfg) {
  return probe_impl(kind, cfg, true);
}

ConfinementReport confinement_probe_serial(const MapKind& kind, const ProbeConfig& cfg) {
  return probe_impl(kind, cfg, false);
}

}  // namespace tentlab
