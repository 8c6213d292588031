#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tentlab/maps.hpp"
#include "tentlab/orbit.hpp"

namespace tentlab {

struct LyapunovEstimate {
  double lambda = 0.0;  ///< nats per iteration
  std::size_t n_samples = 0;
  double standard_error = 0.0;
};

/// Time average of ln|M'(x)| over the post-transient orbit. Throws
/// EscapeError when the orbit leaves the domain before any post-transient
/// sample was collected; a later escape truncates the sample.
LyapunovEstimate estimate_lyapunov(const MapKind& kind, const OrbitConfig& cfg,
                                   std::size_t n_transient);

struct DensityHistogram {
  std::vector<double> edges;  ///< n_bins + 1
  std::vector<std::uint64_t> counts;
  std::vector<double> normalized;  ///< heights; sum(height * bin width) == 1
  std::uint64_t total = 0;
};

/// Histogram of post-transient states (of |x| when use_abs is set),
/// normalized to unit integral. Throws EscapeError if the orbit escapes.
DensityHistogram density_histogram(const MapKind& kind, const OrbitConfig& cfg,
                                   std::size_t n_transient, std::size_t n_bins, bool use_abs);

struct ScanConfig {
  double m_lo = -3.0;
  double m_hi = 3.0;
  std::size_t n_m = 600;
  std::size_t x_bins = 201;  ///< odd by default so one bin straddles x = 0
  std::size_t n_transient = 1000;
  std::size_t n_keep = 10000;
  double x0 = 1e-12;  ///< the 0+ convention
  /// Kept well below x0 so the initial sign survives the growth phase of
  /// slowly expanding columns.
  double dither = 1e-15;
  std::uint64_t seed = 1;
};

struct BifurcationDiagram {
  std::vector<double> m_grid;
  std::vector<double> x_edges;                ///< x_bins + 1 edges over [-1, 1]
  std::vector<std::uint64_t> counts;          ///< column-major: counts[col * n_bins() + bin]
  std::vector<std::uint8_t> escaped_columns;  ///< 1 where the orbit left the domain

  std::size_t n_columns() const noexcept { return m_grid.size(); }
  std::size_t n_bins() const noexcept { return x_edges.empty() ? 0 : x_edges.size() - 1; }
  std::uint64_t count(std::size_t col, std::size_t bin) const {
    return counts[col * n_bins() + bin];
  }
  bool escaped(std::size_t col) const { return escaped_columns[col] != 0; }
};

/// Long-run state density per slope value. Each column runs an independent
/// orbit of the generalized map seeded from (seed, column index); escaped
/// columns are flagged rather than binned. A grid value of exactly 0 is
/// treated as the constant-zero limit of the family.
BifurcationDiagram bifurcation_scan(const ScanConfig& cfg);        ///< OpenMP over columns
BifurcationDiagram bifurcation_scan_serial(const ScanConfig& cfg); ///< reference implementation

struct ProbeConfig {
  std::size_t trials = 100;
  std::size_t steps_per_trial = 10000;
  double dither = kDefaultDither;
  std::uint64_t seed = 1;
};

struct ConfinementReport {
  std::string map;  ///< MapKind::describe() of the probed map
  std::size_t trials = 0;
  std::size_t escapes = 0;
  std::vector<std::optional<std::size_t>> escape_steps;  ///< per trial, set iff escaped
  double max_excursion = 0.0;                            ///< max |x| seen over all trials
};

/// Runs independent dithered orbits from uniform random interior seeds and
/// counts the trials whose undithered map value exits the domain.
ConfinementReport confinement_probe(const MapKind& kind, const ProbeConfig& cfg);
ConfinementReport confinement_probe_serial(const MapKind& kind, const ProbeConfig& cfg);

}  // namespace tentlab
