// tentlab command line: orbits, bifurcation diagrams, Lyapunov exponents and
// chaos-derived random bit streams, all reproducible from a master seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tentlab/analysis.hpp"
#include "tentlab/errors.hpp"
#include "tentlab/maps.hpp"
#include "tentlab/orbit.hpp"
#include "tentlab/trng.hpp"

namespace {

using nlohmann::json;
using namespace tentlab;

constexpr const char* kVersion = "0.1.0";

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// map selection

struct MapOptions {
  std::string selector = "tent";
  double slope_error = 0.0;
  double offset = 0.0;
};

MapKind make_map(const MapOptions& opt) {
  MapKind kind = MapKind::tent();
  if (opt.selector == "tent") {
    kind = MapKind::tent();
  } else if (opt.selector == "bernoulli") {
    kind = MapKind::bernoulli();
  } else if (opt.selector == "modtent") {
    kind = MapKind::modified_tent();
  } else if (opt.selector.rfind("gen:", 0) == 0) {
    const std::string num = opt.selector.substr(4);
    std::size_t used = 0;
    double m = 0.0;
    try {
      m = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (num.empty() || used != num.size())
      throw UsageError("bad slope in map selector '" + opt.selector + "'");
    if (m == 0.0) throw UsageError("generalized map slope must be nonzero");
    if (!std::isfinite(m) || std::abs(m) > 3.5)
      throw UsageError("generalized map slope must lie within [-3.5, 3.5] and be nonzero");
    kind = MapKind::generalized(m, /*escape_study=*/std::abs(m) >= 3.0);
  } else {
    throw UsageError("unknown map selector '" + opt.selector +
                     "' (expected tent|bernoulli|modtent|gen:<m>)");
  }
  if (opt.slope_error != 0.0 || opt.offset != 0.0) {
    NonidealParams p;
    p.slope_error = opt.slope_error;
    p.offset = opt.offset;
    kind = kind.perturbed(p);
  }
  return kind;
}

void add_map_options(CLI::App* cmd, MapOptions& opt) {
  cmd->add_option("--map", opt.selector, "map selector: tent|bernoulli|modtent|gen:<m>")
      ->capture_default_str();
  cmd->add_option("--slope-error", opt.slope_error,
                  "multiplicative slope perturbation (slope scales by 1+e)");
  cmd->add_option("--offset", opt.offset, "additive output perturbation");
}

json map_params(const MapOptions& opt) {
  return json{{"map", opt.selector}, {"slope_error", opt.slope_error}, {"offset", opt.offset}};
}

// ---------------------------------------------------------------------------
// file output

void write_file(const std::string& path, const std::string& payload) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  f.flush();
  if (!f.good()) throw IoError("write to '" + path + "' failed");
}

void write_manifest(const std::string& primary_out, const std::string& subcommand,
                    std::uint64_t seed, const json& params,
                    const std::vector<std::string>& outputs, const json& notes) {
  json m{{"tool", "tentlab"},    {"version", kVersion}, {"subcommand", subcommand},
         {"seed", seed},         {"parameters", params}, {"outputs", outputs}};
  if (!notes.empty()) m["notes"] = notes;
  write_file(primary_out + ".manifest.json", m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// orbit

struct OrbitArgs {
  MapOptions map;
  double x0 = 0.1;
  std::size_t steps = 1000;
  double dither = kDefaultDither;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_orbit(const OrbitArgs& a) {
  const MapKind kind = make_map(a.map);
  OrbitConfig cfg;
  cfg.x0 = a.x0;
  cfg.n_steps = a.steps;
  cfg.dither_amplitude = a.dither;
  cfg.rng_seed = a.seed;
  const OrbitResult orbit = iterate_orbit(kind, cfg);

  std::ostringstream csv;
  csv << "step,x\n0," << fmt17(a.x0) << '\n';
  for (std::size_t k = 0; k < orbit.states.size(); ++k)
    csv << (k + 1) << ',' << fmt17(orbit.states[k]) << '\n';
  if (orbit.escaped_at) csv << "# escaped_at=" << *orbit.escaped_at << '\n';
  if (orbit.absorbed_at_zero) csv << "# absorbed_at_zero=" << *orbit.absorbed_at_zero << '\n';

  if (a.out.empty()) {
    std::cout << csv.str();
    return 0;
  }
  write_file(a.out, csv.str());
  json notes;
  if (orbit.escaped_at) notes["escaped_at"] = *orbit.escaped_at;
  if (orbit.absorbed_at_zero) notes["absorbed_at_zero"] = *orbit.absorbed_at_zero;
  json params = map_params(a.map);
  params["x0"] = a.x0;
  params["steps"] = a.steps;
  params["dither"] = a.dither;
  params["out"] = a.out;
  write_manifest(a.out, "orbit", a.seed, params, {a.out}, notes);
  return 0;
}

// ---------------------------------------------------------------------------
// bifurcate

struct BifurcateArgs {
  double m_lo = -3.0;
  double m_hi = 3.0;
  std::size_t columns = 600;
  std::size_t bins = 201;
  std::size_t transient = 1000;
  std::size_t keep = 10000;
  double x0 = 1e-12;
  double dither = 1e-15;
  std::uint64_t seed = 1;
  std::string out;
  std::string pgm;
};

void write_pgm(const std::string& path, const BifurcationDiagram& d) {
  const std::size_t w = d.n_columns();
  const std::size_t h = d.n_bins();
  // Saturating linear scale, full black at the 98th percentile of the
  // nonzero counts: a few point-mass columns (|m| <= 1 parks every sample
  // in one bin) would otherwise wash the chaotic columns out to white.
  std::vector<std::uint64_t> nonzero;
  for (std::size_t col = 0; col < w; ++col) {
    if (d.escaped(col)) continue;
    for (std::size_t b = 0; b < h; ++b)
      if (d.count(col, b) > 0) nonzero.push_back(d.count(col, b));
  }
  std::uint64_t cap = 1;
  if (!nonzero.empty()) {
    const std::size_t nth = (nonzero.size() - 1) * 98 / 100;
    std::nth_element(nonzero.begin(), nonzero.begin() + static_cast<std::ptrdiff_t>(nth),
                     nonzero.end());
    cap = std::max<std::uint64_t>(nonzero[nth], 1);
  }
  std::string payload = "P5\n" + std::to_string(w) + ' ' + std::to_string(h) + "\n255\n";
  payload.reserve(payload.size() + w * h);
  for (std::size_t row = 0; row < h; ++row) {
    const std::size_t bin = h - 1 - row;  // top row renders x = +1
    for (std::size_t col = 0; col < w; ++col) {
      unsigned char v = 255;  // escaped or empty: white
      if (!d.escaped(col)) {
        const double scaled =
            255.0 * static_cast<double>(d.count(col, bin)) / static_cast<double>(cap);
        v = static_cast<unsigned char>(255 - std::lround(std::min(scaled, 255.0)));
      }
      payload.push_back(static_cast<char>(v));
    }
  }
  write_file(path, payload);
}

int cmd_bifurcate(const BifurcateArgs& a) {
  if (!(a.m_lo > -3.5 && a.m_hi < 3.5 && a.m_lo <= a.m_hi))
    throw UsageError("m range must lie within (-3.5, 3.5)");
  if (a.out.empty()) throw UsageError("--out is required for bifurcate");
  ScanConfig cfg;
  cfg.m_lo = a.m_lo;
  cfg.m_hi = a.m_hi;
  cfg.n_m = a.columns;
  cfg.x_bins = a.bins;
  cfg.n_transient = a.transient;
  cfg.n_keep = a.keep;
  cfg.x0 = a.x0;
  cfg.dither = a.dither;
  cfg.seed = a.seed;
  const BifurcationDiagram d = bifurcation_scan(cfg);

  std::ostringstream csv;
  csv << "m,x_bin_center,count\n";
  std::vector<double> escaped_m;
  for (std::size_t col = 0; col < d.n_columns(); ++col) {
    if (d.escaped(col)) {
      escaped_m.push_back(d.m_grid[col]);
      continue;
    }
    for (std::size_t b = 0; b < d.n_bins(); ++b) {
      const std::uint64_t count = d.count(col, b);
      if (count == 0) continue;
      const double center = 0.5 * (d.x_edges[b] + d.x_edges[b + 1]);
      csv << fmt17(d.m_grid[col]) << ',' << fmt17(center) << ',' << count << '\n';
    }
  }
  if (!escaped_m.empty()) {
    csv << "# escaped_m=";
    for (std::size_t i = 0; i < escaped_m.size(); ++i)
      csv << (i ? " " : "") << fmt17(escaped_m[i]);
    csv << '\n';
  }
  write_file(a.out, csv.str());

  std::vector<std::string> outputs{a.out};
  if (!a.pgm.empty()) {
    write_pgm(a.pgm, d);
    outputs.push_back(a.pgm);
  }
  json params{{"m_lo", a.m_lo},   {"m_hi", a.m_hi},         {"columns", a.columns},
              {"bins", a.bins},   {"transient", a.transient}, {"keep", a.keep},
              {"x0", a.x0},       {"dither", a.dither},     {"out", a.out},
              {"pgm", a.pgm}};
  json notes;
  if (!escaped_m.empty()) notes["escaped_m"] = escaped_m;
  write_manifest(a.out, "bifurcate", a.seed, params, outputs, notes);
  return 0;
}

// ---------------------------------------------------------------------------
// lyapunov

struct LyapunovArgs {
  MapOptions map;
  double x0 = 0.1;
  std::size_t steps = 1000000;
  std::size_t transient = 1000;
  double dither = kDefaultDither;
  std::uint64_t seed = 1;
  bool as_json = false;
};

int cmd_lyapunov(const LyapunovArgs& a) {
  const MapKind kind = make_map(a.map);
  OrbitConfig cfg;
  cfg.x0 = a.x0;
  cfg.n_steps = a.steps;
  cfg.dither_amplitude = a.dither;
  cfg.rng_seed = a.seed;
  const LyapunovEstimate est = estimate_lyapunov(kind, cfg, a.transient);
  if (a.as_json) {
    const json out{{"lambda", est.lambda}, {"stderr", est.standard_error}, {"n", est.n_samples}};
    std::cout << out.dump() << '\n';
  } else {
    std::cout << "lambda=" << fmt17(est.lambda) << " stderr=" << fmt17(est.standard_error)
              << " n=" << est.n_samples << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bits

struct BitsArgs {
  MapOptions map;
  std::size_t count = 0;
  double x0 = 0.1;
  double dither = kDefaultDither;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "packed";
};

BitStream generate_bits(const MapOptions& mopt, std::size_t count, double x0, double dither,
                        std::uint64_t seed, OrbitResult* orbit_out = nullptr) {
  const MapKind kind = make_map(mopt);
  OrbitConfig cfg;
  cfg.x0 = x0;
  cfg.n_steps = count;
  cfg.dither_amplitude = dither;
  cfg.rng_seed = seed;
  OrbitResult orbit = iterate_orbit(kind, cfg);
  if (orbit.escaped_at)
    throw UsageError("orbit escaped at step " + std::to_string(*orbit.escaped_at) +
                     "; bit generation needs a confined map");
  BitStream bits = extract_bits(orbit, PartitionRule{});
  bits.provenance.kind = kind;
  bits.provenance.config = cfg;
  if (orbit_out) *orbit_out = std::move(orbit);
  return bits;
}

int cmd_bits(const BitsArgs& a) {
  if (a.count == 0) throw UsageError("--count must be >= 1");
  if (a.format != "packed" && a.format != "ascii")
    throw UsageError("--format must be packed or ascii");
  OrbitResult orbit;
  const BitStream bits = generate_bits(a.map, a.count, a.x0, a.dither, a.seed, &orbit);

  std::string payload;
  if (a.format == "ascii") {
    payload = bits.to_ascii() + "\n";
  } else {
    payload.assign(bits.bytes().begin(), bits.bytes().end());
  }
  if (a.out.empty()) {
    std::cout.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    std::cout.flush();
    if (orbit.absorbed_at_zero)
      std::cerr << "# absorbed_at_zero=" << *orbit.absorbed_at_zero << '\n';
    return 0;
  }
  write_file(a.out, payload);
  json notes;
  if (orbit.absorbed_at_zero) notes["absorbed_at_zero"] = *orbit.absorbed_at_zero;
  json params = map_params(a.map);
  params["count"] = a.count;
  params["x0"] = a.x0;
  params["dither"] = a.dither;
  params["format"] = a.format;
  params["out"] = a.out;
  write_manifest(a.out, "bits", a.seed, params, {a.out}, notes);
  return 0;
}

// ---------------------------------------------------------------------------
// test

struct TestArgs {
  MapOptions map;
  std::size_t count = 1000000;
  double x0 = 0.1;
  double dither = kDefaultDither;
  std::uint64_t seed = 1;
  std::string in;
  std::string format = "ascii";
  std::size_t nbits = 0;
  double alpha = 0.01;
  bool as_json = false;
  bool map_given = false;
};

BitStream load_bits(const TestArgs& a) {
  std::ifstream f(a.in, std::ios::binary);
  if (!f) throw IoError("cannot open '" + a.in + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string payload = ss.str();
  if (a.format == "ascii") return BitStream::from_ascii(payload);
  if (a.format != "packed") throw UsageError("--format must be packed or ascii");
  std::vector<std::uint8_t> bytes(payload.begin(), payload.end());
  const std::size_t n = a.nbits > 0 ? a.nbits : bytes.size() * 8;
  return BitStream::from_bytes(std::move(bytes), n);
}

int cmd_test(const TestArgs& a) {
  BitStream bits;
  if (!a.in.empty())
    bits = load_bits(a);
  else
    bits = generate_bits(a.map, a.count, a.x0, a.dither, a.seed);

  TestReport report;
  MarkovEstimate markov;
  try {
    report = run_suite(bits, a.alpha);
    markov = estimate_markov(bits);
  } catch (const InsufficientDataError& e) {
    std::cerr << "tentlab: " << e.what() << " (need " << e.required() << ", got " << bits.size()
              << ")\n";
    return 1;
  }

  if (a.as_json) {
    json tests = json::array();
    for (const TestResult& e : report.entries)
      tests.push_back(json{{"name", e.name},
                           {"statistic", e.statistic},
                           {"p_value", e.p_value},
                           {"pass", e.pass},
                           {"skipped", e.skipped},
                           {"note", e.note}});
    json mk{{"n11", markov.n11}, {"n10", markov.n10}, {"n01", markov.n01}, {"n00", markov.n00}};
    mk["p"] = markov.p ? json(*markov.p) : json();
    mk["q"] = markov.q ? json(*markov.q) : json();
    const json out{{"alpha", report.alpha},
                   {"n_bits", bits.size()},
                   {"suite_pass", report.suite_pass},
                   {"tests", tests},
                   {"markov", mk}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::printf("%-28s %14s %12s  %s\n", "test", "statistic", "p-value", "result");
    for (const TestResult& e : report.entries) {
      const char* verdict = e.skipped ? "skipped" : (e.pass ? "pass" : "FAIL");
      std::printf("%-28s %14.6g %12.6g  %s%s%s\n", e.name.c_str(), e.statistic, e.p_value,
                  verdict, e.note.empty() ? "" : "  # ", e.note.c_str());
    }
    const std::string p = markov.p ? fmt17(*markov.p) : "undefined";
    const std::string q = markov.q ? fmt17(*markov.q) : "undefined";
    std::printf("markov p=%s q=%s (n11=%llu n10=%llu n01=%llu n00=%llu)\n", p.c_str(), q.c_str(),
                static_cast<unsigned long long>(markov.n11),
                static_cast<unsigned long long>(markov.n10),
                static_cast<unsigned long long>(markov.n01),
                static_cast<unsigned long long>(markov.n00));
    std::printf("suite=%s alpha=%g n=%zu\n", report.suite_pass ? "PASS" : "FAIL", report.alpha,
                bits.size());
  }
  return report.suite_pass ? 0 : 3;
}

// ---------------------------------------------------------------------------
// confine

struct ConfineArgs {
  MapOptions map;
  std::size_t trials = 100;
  std::size_t steps = 10000;
  double dither = kDefaultDither;
  std::uint64_t seed = 1;
  bool as_json = false;
};

int cmd_confine(const ConfineArgs& a) {
  const MapKind kind = make_map(a.map);
  ProbeConfig cfg;
  cfg.trials = a.trials;
  cfg.steps_per_trial = a.steps;
  cfg.dither = a.dither;
  cfg.seed = a.seed;
  const ConfinementReport rep = confinement_probe(kind, cfg);

  std::vector<std::size_t> steps;
  for (const auto& s : rep.escape_steps)
    if (s) steps.push_back(*s);
  std::sort(steps.begin(), steps.end());
  std::optional<std::size_t> median;
  if (!steps.empty()) median = steps[steps.size() / 2];

  const double rate = static_cast<double>(rep.escapes) / static_cast<double>(rep.trials);
  if (a.as_json) {
    json out{{"map", rep.map},
             {"trials", rep.trials},
             {"escapes", rep.escapes},
             {"escape_rate", rate},
             {"max_excursion", rep.max_excursion}};
    out["median_escape_step"] = median ? json(*median) : json();
    std::cout << out.dump() << '\n';
  } else {
    std::cout << "map=" << rep.map << " trials=" << rep.trials << " escapes=" << rep.escapes
              << " escape_rate=" << fmt17(rate) << " median_escape_step="
              << (median ? std::to_string(*median) : std::string("n/a"))
              << " max_excursion=" << fmt17(rep.max_excursion) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise-affine chaotic maps: orbits, diagnostics and random bit generation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  OrbitArgs oa;
  auto* orbit = app.add_subcommand("orbit", "iterate a map and emit the trajectory as CSV");
  add_map_options(orbit, oa.map);
  orbit->add_option("--x0", oa.x0, "initial state")->capture_default_str();
  orbit->add_option("--steps", oa.steps, "number of iterations")->capture_default_str();
  orbit->add_option("--dither", oa.dither, "noise half-width, uniform(-a,a)")->capture_default_str();
  orbit->add_option("--seed", oa.seed, "master seed")->capture_default_str();
  orbit->add_option("--out", oa.out, "CSV path (stdout when omitted)");

  BifurcateArgs ba;
  auto* bif = app.add_subcommand("bifurcate", "density of long-run states over a slope grid");
  bif->add_option("--m-lo", ba.m_lo, "lowest slope")->capture_default_str();
  bif->add_option("--m-hi", ba.m_hi, "highest slope")->capture_default_str();
  bif->add_option("--columns", ba.columns, "number of slope grid points")->capture_default_str();
  bif->add_option("--bins", ba.bins, "state bins over [-1,1]")->capture_default_str();
  bif->add_option("--transient", ba.transient, "discarded steps per column")->capture_default_str();
  bif->add_option("--keep", ba.keep, "kept samples per column")->capture_default_str();
  bif->add_option("--x0", ba.x0, "initial state (0+ convention)")->capture_default_str();
  bif->add_option("--dither", ba.dither, "noise half-width")->capture_default_str();
  bif->add_option("--seed", ba.seed, "master seed")->capture_default_str();
  bif->add_option("--out", ba.out, "long-form CSV path")->required();
  bif->add_option("--pgm", ba.pgm, "optional 8-bit grayscale PGM path (darker = denser)");

  LyapunovArgs la;
  auto* lya = app.add_subcommand("lyapunov", "estimate the Lyapunov exponent of a map");
  add_map_options(lya, la.map);
  lya->add_option("--x0", la.x0, "initial state")->capture_default_str();
  lya->add_option("--steps", la.steps, "orbit length")->capture_default_str();
  lya->add_option("--transient", la.transient, "discarded steps")->capture_default_str();
  lya->add_option("--dither", la.dither, "noise half-width")->capture_default_str();
  lya->add_option("--seed", la.seed, "master seed")->capture_default_str();
  lya->add_flag("--json", la.as_json, "machine-readable output");

  BitsArgs bta;
  auto* bits = app.add_subcommand("bits", "generate random bits from a chaotic orbit");
  add_map_options(bits, bta.map);
  bits->add_option("--count", bta.count, "number of bits")->required();
  bits->add_option("--x0", bta.x0, "initial state")->capture_default_str();
  bits->add_option("--dither", bta.dither, "noise half-width")->capture_default_str();
  bits->add_option("--seed", bta.seed, "master seed")->capture_default_str();
  bits->add_option("--out", bta.out, "output path (stdout when omitted)");
  bits->add_option("--format", bta.format, "packed|ascii")->capture_default_str();

  TestArgs ta;
  auto* test = app.add_subcommand("test", "run the randomness battery over a bit stream");
  add_map_options(test, ta.map);
  test->add_option("--count", ta.count, "bits to generate when no --in is given")
      ->capture_default_str();
  test->add_option("--x0", ta.x0, "initial state")->capture_default_str();
  test->add_option("--dither", ta.dither, "noise half-width")->capture_default_str();
  test->add_option("--seed", ta.seed, "master seed")->capture_default_str();
  test->add_option("--in", ta.in, "read bits from a file instead of generating");
  test->add_option("--format", ta.format, "input format: ascii|packed")->capture_default_str();
  test->add_option("--nbits", ta.nbits, "bit count for packed input (default: 8 * file size)");
  test->add_option("--alpha", ta.alpha, "significance level")->capture_default_str();
  test->add_flag("--json", ta.as_json, "machine-readable output");

  ConfineArgs ca;
  auto* confine = app.add_subcommand("confine", "probe state confinement under perturbation");
  add_map_options(confine, ca.map);
  confine->add_option("--trials", ca.trials, "independent orbits")->capture_default_str();
  confine->add_option("--steps", ca.steps, "steps per trial")->capture_default_str();
  confine->add_option("--dither", ca.dither, "noise half-width")->capture_default_str();
  confine->add_option("--seed", ca.seed, "master seed")->capture_default_str();
  confine->add_flag("--json", ca.as_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (orbit->parsed()) return cmd_orbit(oa);
    if (bif->parsed()) return cmd_bifurcate(ba);
    if (lya->parsed()) return cmd_lyapunov(la);
    if (bits->parsed()) return cmd_bits(bta);
    if (test->parsed()) return cmd_test(ta);
    if (confine->parsed()) return cmd_confine(ca);
  } catch (const IoError& e) {
    std::cerr << "tentlab: " << e.what() << '\n';
    return 2;
  } catch (const EscapeError& e) {
    std::cerr << "tentlab: escape: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "tentlab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
