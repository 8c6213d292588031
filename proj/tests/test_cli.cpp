#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_bin;
fs::path g_dir;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path out = g_dir / ("stdout." + std::to_string(counter));
  const fs::path err = g_dir / ("stderr." + std::to_string(counter));
  ++counter;
  const std::string cmd = g_bin + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("orbit CSV matches the hand iteration") {
  const auto r = run("orbit --map modtent --x0 0.3 --steps 4 --dither 0");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "step,x");
  const double want[] = {0.3, -0.6, 0.8, -0.4, 0.8};
  for (int k = 0; k <= 4; ++k) {
    REQUIRE(std::getline(lines, line));
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    CHECK(line.substr(0, comma) == std::to_string(k));
    CHECK(std::stod(line.substr(comma + 1)) == doctest::Approx(want[k]).epsilon(1e-14));
  }
}

TEST_CASE("orbit reaching zero is annotated") {
  const auto r = run("orbit --map modtent --x0 0.3 --steps 60 --dither 0");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("# absorbed_at_zero=55") != std::string::npos);
}

TEST_CASE("escaping orbit exits zero with a truncated file and a manifest note") {
  const fs::path out = g_dir / "escape.csv";
  const auto r = run("orbit --map gen:3.2 --x0 0.9 --steps 1000 --dither 0 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("# escaped_at=") != std::string::npos);
  const json m = json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(m["notes"]["escaped_at"].is_number());
}

TEST_CASE("contracting orbit settles below 1e-6") {
  const fs::path out = g_dir / "settle.csv";
  const auto r = run("orbit --map gen:0.5 --x0 0.9 --steps 50 --dither 0 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(out);
  const auto last_nl = csv.find_last_of('\n', csv.size() - 2);
  const std::string last_row = csv.substr(last_nl + 1);
  const double x = std::stod(last_row.substr(last_row.find(',') + 1));
  CHECK(std::abs(x) < 1e-6);
}

TEST_CASE("identical commands produce byte-identical files and manifests") {
  const fs::path a = g_dir / "rep.csv";
  const std::string cmd = "orbit --map gen:-2.3 --x0 0.25 --steps 500 --dither 1e-12 --seed 7 --out " + a.string();
  REQUIRE(run(cmd).exit_code == 0);
  const std::string first = slurp(a);
  const std::string first_manifest = slurp(a.string() + ".manifest.json");
  REQUIRE(run(cmd).exit_code == 0);
  CHECK(slurp(a) == first);
  CHECK(slurp(a.string() + ".manifest.json") == first_manifest);
  REQUIRE_FALSE(first_manifest.empty());
  const json m = json::parse(first_manifest);
  CHECK(m["subcommand"] == "orbit");
  CHECK(m["seed"] == 7);
  CHECK(m["parameters"]["x0"] == 0.25);
}

TEST_CASE("bits ascii output is the frozen 16-character string") {
  const auto r = run("bits --map modtent --count 16 --dither 0 --x0 0.3 --format ascii");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "0010101010101010\n");
}

TEST_CASE("packed bits have ceil(n/8) bytes") {
  const fs::path out = g_dir / "bits.bin";
  const auto r = run("bits --map modtent --count 12 --dither 1e-12 --seed 3 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(fs::file_size(out) == 2);
  const auto again = run("bits --map modtent --count 12 --dither 1e-12 --seed 3 --out " +
                         (g_dir / "bits2.bin").string());
  REQUIRE(again.exit_code == 0);
  CHECK(slurp(out) == slurp(g_dir / "bits2.bin"));
}

TEST_CASE("lyapunov output format and value") {
  const auto r = run("lyapunov --map tent --steps 1000000 --dither 1e-12 --seed 1");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.rfind("lambda=", 0) == 0);
  CHECK(r.out.find(" stderr=") != std::string::npos);
  CHECK(r.out.find(" n=999000") != std::string::npos);
  const double lambda = std::stod(r.out.substr(7));
  CHECK(lambda == doctest::Approx(0.6931471805599453).epsilon(1e-6));

  const auto j = run("lyapunov --map gen:-2.5 --steps 100000 --dither 1e-12 --json");
  REQUIRE(j.exit_code == 0);
  const json parsed = json::parse(j.out);
  CHECK(double(parsed["lambda"]) == doctest::Approx(std::log(2.5)).epsilon(1e-9));

  const auto neg = run("lyapunov --map gen:0.8 --steps 50000");
  REQUIRE(neg.exit_code == 0);
  CHECK(std::stod(neg.out.substr(7)) < 0.0);
}

TEST_CASE("lyapunov on an escaping map is a diagnostic failure") {
  const auto r = run("lyapunov --map gen:3.2 --steps 100000 --x0 0.9");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("escape") != std::string::npos);
}

TEST_CASE("test subcommand verdicts and exit codes") {
  const auto pass = run("test --map modtent --count 1000000 --dither 1e-12 --seed 42 --json");
  REQUIRE(pass.exit_code == 0);
  const json rep = json::parse(pass.out);
  CHECK(rep["suite_pass"] == true);
  const double p = rep["markov"]["p"];
  const double q = rep["markov"]["q"];
  CHECK(p >= 0.49);
  CHECK(p <= 0.51);
  CHECK(q >= 0.49);
  CHECK(q <= 0.51);
  REQUIRE(rep["tests"].size() == 4);
  for (const auto& t : rep["tests"]) {
    CHECK(t["pass"] == true);
    CHECK(double(t["p_value"]) >= 0.01);
  }

  const auto biased = run("test --map gen:1.5 --count 100000 --dither 1e-12 --x0 0.3");
  CHECK(biased.exit_code == 3);

  const fs::path zeros = g_dir / "zeros.txt";
  std::ofstream(zeros) << std::string(12000, '0') << "\n";
  const auto z = run("test --in " + zeros.string());
  CHECK(z.exit_code == 3);
  CHECK(z.out.find("monobit") != std::string::npos);
  CHECK(z.out.find("FAIL") != std::string::npos);

  const fs::path small = g_dir / "small.txt";
  std::ofstream(small) << std::string(500, '1');
  const auto s = run("test --in " + small.string());
  CHECK(s.exit_code == 1);
  CHECK(s.err.find("10000") != std::string::npos);
}

TEST_CASE("test subcommand reads packed streams back") {
  const fs::path packed = g_dir / "packed.bin";
  REQUIRE(run("bits --map modtent --count 50000 --dither 1e-12 --seed 9 --out " + packed.string())
              .exit_code == 0);
  const auto r = run("test --in " + packed.string() + " --format packed --nbits 50000");
  CHECK(r.exit_code == 0);
}

TEST_CASE("confine matches the confinement contrast") {
  const auto esc = run("confine --map tent --slope-error 0.05 --trials 20 --steps 5000 --json");
  REQUIRE(esc.exit_code == 0);
  const json e = json::parse(esc.out);
  CHECK(e["trials"] == 20);
  CHECK(e["escapes"] == 20);
  CHECK(double(e["escape_rate"]) == 1.0);
  CHECK(double(e["max_excursion"]) > 1.0);

  const auto confined = run("confine --map gen:-2.05 --trials 10 --steps 20000 --json");
  REQUIRE(confined.exit_code == 0);
  const json c = json::parse(confined.out);
  CHECK(c["escapes"] == 0);
  CHECK(c["median_escape_step"].is_null());

  const auto beyond = run("confine --map gen:3.2 --trials 10 --steps 10000");
  REQUIRE(beyond.exit_code == 0);
  CHECK(beyond.out.find("escapes=10") != std::string::npos);
}

TEST_CASE("bifurcate writes CSV and PGM with flagged columns absent") {
  const fs::path csv = g_dir / "bif.csv";
  const fs::path pgm = g_dir / "bif.pgm";
  const auto r = run("bifurcate --m-lo -3.3 --m-hi 3.3 --columns 45 --bins 31 --transient 200 "
                     "--keep 800 --seed 5 --out " + csv.string() + " --pgm " + pgm.string());
  REQUIRE(r.exit_code == 0);

  const std::string text = slurp(csv);
  REQUIRE(text.rfind("m,x_bin_center,count", 0) == 0);
  CHECK(text.find("# escaped_m=") != std::string::npos);
  // no data rows for the out-of-range slopes
  CHECK(text.find("\n-3.3,") == std::string::npos);
  CHECK(text.find("\n3.3,") == std::string::npos);

  const std::string img = slurp(pgm);
  REQUIRE(img.rfind("P5\n45 31\n255\n", 0) == 0);
  CHECK(img.size() == std::string("P5\n45 31\n255\n").size() + 45 * 31);

  // escaped edge columns render white
  const std::size_t header = std::string("P5\n45 31\n255\n").size();
  for (std::size_t row = 0; row < 31; ++row) {
    CHECK(static_cast<unsigned char>(img[header + row * 45]) == 255);
    CHECK(static_cast<unsigned char>(img[header + row * 45 + 44]) == 255);
  }

  const json m = json::parse(slurp(csv.string() + ".manifest.json"));
  CHECK(m["subcommand"] == "bifurcate");
  REQUIRE(m["outputs"].size() == 2);

  // rerun reproduces both artifacts byte for byte
  const std::string csv1 = slurp(csv);
  const std::string pgm1 = slurp(pgm);
  REQUIRE(run("bifurcate --m-lo -3.3 --m-hi 3.3 --columns 45 --bins 31 --transient 200 "
              "--keep 800 --seed 5 --out " + csv.string() + " --pgm " + pgm.string())
              .exit_code == 0);
  CHECK(slurp(csv) == csv1);
  CHECK(slurp(pgm) == pgm1);
}

TEST_CASE("positive-regime scan stays positive") {
  const fs::path csv = g_dir / "pos.csv";
  const auto r = run("bifurcate --m-lo 1.1 --m-hi 2.0 --columns 10 --bins 41 --transient 500 "
                     "--keep 1000 --out " + csv.string());
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double center = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(center > -0.05);  // no mass in strictly negative bins
  }
}

TEST_CASE("usage and IO failures use the documented exit codes") {
  CHECK(run("orbit --map nosuch --steps 5").exit_code == 1);
  CHECK(run("orbit --map gen:0 --steps 5").exit_code == 1);
  CHECK(run("orbit --map tent --x0 1.5 --steps 5").exit_code == 1);
  CHECK(run("bifurcate --m-lo -4 --m-hi 4").exit_code == 1);
  CHECK(run("").exit_code == 1);
  CHECK(run("--help").exit_code == 0);
  CHECK(run("orbit --map tent --steps 5 --out /nonexistent-dir-xyz/o.csv").exit_code == 2);
  CHECK(run("bits --map gen:3.2 --count 1000 --x0 0.9").exit_code == 1);  // escaping orbit
}

int main(int argc, char** argv) {
  std::vector<char*> args(argv, argv + argc);
  if (args.size() > 1 && args.back()[0] != '-') {
    g_bin = args.back();
    args.pop_back();
  } else if (const char* env = std::getenv("TENTLAB_BIN")) {
    g_bin = env;
  }
  if (g_bin.empty()) {
    std::fprintf(stderr, "usage: test_cli [doctest options] <path-to-tentlab-binary>\n");
    return 2;
  }
  g_dir = fs::temp_directory_path() / ("tentlab_cli_" + std::to_string(::getpid()));
  fs::create_directories(g_dir);
  doctest::Context ctx(static_cast<int>(args.size()), args.data());
  const int rc = ctx.run();
  std::error_code ec;
  fs::remove_all(g_dir, ec);
  return rc;
}
