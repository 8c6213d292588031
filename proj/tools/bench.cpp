// Compares the OpenMP kernels against their serial reference implementations
// and verifies that both produce identical results.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tentlab/analysis.hpp"

using namespace tentlab;

namespace {

template <class F>
double time_seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_diagram(const BifurcationDiagram& a, const BifurcationDiagram& b) {
  return a.m_grid == b.m_grid && a.counts == b.counts &&
         a.escaped_columns == b.escaped_columns;
}

bool same_report(const ConfinementReport& a, const ConfinementReport& b) {
  return a.escapes == b.escapes && a.escape_steps == b.escape_steps &&
         a.max_excursion == b.max_excursion;
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::string(argv[1]) == "--quick";

  ScanConfig scan;
  scan.n_m = quick ? 120 : 600;
  scan.n_keep = quick ? 2000 : 10000;
  scan.seed = 7;

  ProbeConfig probe;
  probe.trials = quick ? 20 : 100;
  probe.steps_per_trial = quick ? 100000 : 1000000;
  probe.seed = 7;
  const MapKind confined = MapKind::generalized(-2.05);

  BifurcationDiagram scan_serial, scan_parallel;
  const double t_scan_serial = time_seconds([&] { scan_serial = bifurcation_scan_serial(scan); });
  const double t_scan_parallel = time_seconds([&] { scan_parallel = bifurcation_scan(scan); });
  const bool scan_ok = same_diagram(scan_serial, scan_parallel);

  ConfinementReport probe_serial, probe_parallel;
  const double t_probe_serial =
      time_seconds([&] { probe_serial = confinement_probe_serial(confined, probe); });
  const double t_probe_parallel =
      time_seconds([&] { probe_parallel = confinement_probe(confined, probe); });
  const bool probe_ok = same_report(probe_serial, probe_parallel);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
  std::printf("%-22s %12s %12s %9s %10s\n", "kernel", "serial [s]", "openmp [s]", "speedup",
              "identical");
  std::printf("%-22s %12.3f %12.3f %8.2fx %10s\n", "bifurcation_scan", t_scan_serial,
              t_scan_parallel, t_scan_serial / t_scan_parallel, scan_ok ? "yes" : "NO");
  std::printf("%-22s %12.3f %12.3f %8.2fx %10s\n", "confinement_probe", t_probe_serial,
              t_probe_parallel, t_probe_serial / t_probe_parallel, probe_ok ? "yes" : "NO");
  return scan_ok && probe_ok ? 0 : 1;
}
