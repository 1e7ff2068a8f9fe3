#include <gtest/gtest.h>

#include <bit>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "glv/config.hpp"
#include "glv/errors.hpp"
#include "glv/io.hpp"
#include "glv/report.hpp"
#include "runner.hpp"

using namespace glv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("glv_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Ten fields: rectangles, centred disks and cylinders with and without a
// cross-section mask, random values.
std::vector<ComplexField> random_fields() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  std::uniform_int_distribution<int> N(9, 40);
  std::vector<ComplexField> out;
  for (int q = 0; q < 10; ++q) {
    const std::size_t n = std::size_t(N(rng));
    const double a = 0.5 + 0.1 * q;
    GridSpec g;
    switch (q % 4) {
      case 0: g = GridSpec::square(n, a); break;
      case 1: g = GridSpec::disk(n, a, 0.9 * a); break;
      case 2: g = GridSpec::cylinder(n, 8 + std::size_t(q), a, 0.0); break;
      default: g = GridSpec::cylinder(n, 8, a, 0.8 * a); break;
    }
    auto u = ComplexField::sample(g, 0.01 * (q + 1), [](double, double, double) { return cplx{}; });
    std::vector<cplx> v(g.size());
    for (auto& z : v) z = {U(rng), U(rng)};
    out.push_back(u.with_values(std::move(v)));
  }
  return out;
}

// commas outside double quotes
std::size_t separators(const std::string& line) {
  std::size_t n = 0;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    n += !quoted && c == ',';
  }
  return n;
}

RunConfig quick_identity() {
  return parse_config(
      "[run]\nexperiment = identity\nseed = 5\n[model]\neps = 1e-2, 5e-3, 2e-3\n"
      "[grid]\nn = 513\n[vortex]\ndegrees = 1\n",
      true);
}

}  // namespace

TEST(Config, ParsesSectionsAndEcho) {
  const auto c = parse_config(
      "# comment\n[run]\nexperiment = identity  # trailing\nseed = 3\n"
      "; full-line comment\n[model]\neps = 1e-3, 1e-2\n"
      "[vortex]\ndegrees = 1, -1\ncenters = 0.1 0; -0.1 0\n",
      true);
  EXPECT_EQ(c.experiment, "identity");
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.eps, (std::vector<double>{1e-3, 1e-2}));
  EXPECT_EQ(c.degrees, (std::vector<int>{1, -1}));
  ASSERT_EQ(c.centers.size(), 2u);
  EXPECT_EQ(c.centers[1].x, -0.1);
  ASSERT_EQ(c.echo.size(), 5u);
  EXPECT_EQ(c.echo[0].first, "run.experiment");
  EXPECT_EQ(c.echo[0].second, "identity");
}

TEST(Config, ErrorsCarryPosition) {
  try {
    parse_config("[run]\nexperiment = identity\n[model]\neps = abc\n", true);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 7);
  }
  try {
    parse_config("[run]\nexperiment = identity\n  bogus line\n", true);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  try {
    parse_config("[run\n", true);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(Config, SeparationExponentRange) {
  try {
    parse_config("[run]\nexperiment = identity\n[vortex]\ndegrees = 1, 1\nseparation_exponent = 1.2\n",
                 true);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("separation_exponent out of [0,1)"), std::string::npos);
    EXPECT_EQ(e.line(), 5);
  }
}

TEST(Config, StrictAndLenient) {
  const std::string text = "[run]\nexperiment = clearing\n[model]\neps = 1e-2\nfoo = 1\n";
  try {
    parse_config(text, true);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("model.foo"), std::string::npos);
    EXPECT_EQ(e.line(), 5);
    EXPECT_EQ(e.column(), 1);
  }
  std::vector<std::string> warnings;
  const auto c = parse_config(text, false, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("model.foo"), std::string::npos);
  EXPECT_EQ(c.experiment, "clearing");
}

TEST(Config, RangeChecks) {
  EXPECT_THROW(parse_config("[run]\nexperiment = nope\n", true), ConfigError);
  EXPECT_THROW(parse_config("[run]\nexperiment = identity\n[model]\neps = 0.7\n", true), ConfigError);
  EXPECT_THROW(parse_config("[run]\nexperiment = sweep\n[sweep]\ntaus = 0, 1\n", true), ConfigError);
  EXPECT_THROW(parse_config("[model]\neps = 0.1\n", true), ConfigError);
}

TEST(Config, ShippedConfigsLoad) {
  const char* dir = std::getenv("GLV_CONFIG_DIR");
  if (!dir) GTEST_SKIP() << "GLV_CONFIG_DIR not set";
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".ini") continue;
    EXPECT_NO_THROW(load_config(entry.path(), true)) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5);
}

TEST(FieldIo, RoundTripBitExact) {
  const auto dir = scratch("roundtrip");
  int q = 0;
  for (const auto& u : random_fields()) {
    const auto path = dir / ("f" + std::to_string(q++) + ".glf");
    dump_field(u, path);
    const auto w = load_field(path);
    const auto& g = u.grid();
    const auto& h = w.grid();
    ASSERT_EQ(h.dim(), g.dim());
    ASSERT_EQ(h.size(), g.size());
    EXPECT_EQ(h.topology, g.topology);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(h.h), std::bit_cast<std::uint64_t>(g.h));
    EXPECT_EQ(std::bit_cast<std::uint64_t>(w.epsilon()), std::bit_cast<std::uint64_t>(u.epsilon()));
    EXPECT_EQ(w.mask(), u.mask());
    for (std::size_t n = 0; n < g.size(); ++n) {
      if (!u.active(n)) continue;
      const cplx a = u[n], b = w[n];
      ASSERT_EQ(std::memcmp(&a, &b, sizeof(cplx)), 0) << n;
    }
    // and the encoding itself is stable
    EXPECT_EQ(encode_field(w), encode_field(u));
  }
}

TEST(FieldIo, Truncated) {
  const auto u = random_fields()[0];
  auto bytes = encode_field(u);
  bytes.resize(bytes.size() - 7);
  try {
    decode_field(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(std::string(e.what()), "truncated payload at byte " + std::to_string(bytes.size()));
  }
  bytes.resize(10);
  EXPECT_THROW(decode_field(bytes), FormatError);
}

TEST(FieldIo, HeaderErrors) {
  const auto fields = random_fields();
  auto bytes = encode_field(fields[2]);  // a cylinder
  // dim (4 bytes) and three axis counts precede h and eps
  const std::size_t topo = 4 + 4 + 3 * 4 + 8 + 8;
  ASSERT_EQ(bytes[topo], 2);
  bytes[topo] = 0;
  EXPECT_THROW(decode_field(bytes), FormatError);
  bytes[topo] = 7;
  EXPECT_THROW(decode_field(bytes), FormatError);
  auto bad = encode_field(fields[0]);
  bad[0] = 'X';
  try {
    decode_field(bad);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("magic"), std::string::npos);
  }
  // NaN inside the active region of a rectangle
  auto nan = encode_field(fields[0]);
  const double q = std::numeric_limits<double>::quiet_NaN();
  std::memcpy(&nan[nan.size() - 16], &q, 8);
  std::memcpy(&nan[nan.size() - 8], &q, 8);
  EXPECT_THROW(decode_field(nan), FormatError);
  EXPECT_THROW(load_field("/nonexistent/field.glf"), Error);
}

TEST(Report, EmptyList) {
  const auto dir = scratch("empty");
  const auto files = emit_report({}, dir);
  EXPECT_TRUE(fs::exists(dir / "index.txt"));
  EXPECT_EQ(slurp(dir / "index.txt"), "");
  EXPECT_EQ(files.size(), 2u);  // index and the empty jsonl
}

TEST(Report, CsvAndJson) {
  ExperimentReport r;
  r.name = "probe";
  r.input("eps", 1e-3);
  r.input("degrees", "1,1");
  r.predicted = 3.0;
  r.measured = 3.1;
  r.tolerance = 0.35;
  r.extra("gap", 0.1);
  r.settle();
  r.runtime = 12.5;
  const auto csv = report_csv(r);
  std::istringstream is(csv);
  std::string head, row;
  std::getline(is, head);
  std::getline(is, row);
  EXPECT_NE(head.find("predicted"), std::string::npos);
  EXPECT_NE(head.find("measured"), std::string::npos);
  EXPECT_NE(head.find("tolerance"), std::string::npos);
  EXPECT_NE(head.find("pass"), std::string::npos);
  EXPECT_NE(head.find("gap"), std::string::npos);
  EXPECT_NE(row.find("\"1,1\""), std::string::npos);  // quoted
  EXPECT_EQ(separators(head), separators(row));
  const auto js = report_json(r);
  EXPECT_EQ(js.find("runtime"), std::string::npos);
  EXPECT_NE(js.find("\"probe\""), std::string::npos);
  EXPECT_EQ(js.find('\n'), std::string::npos);
}

TEST(Report, ThetaTauTable) {
  std::vector<ExperimentReport> reps;
  for (int k : {2, 3})
    for (double tau : {0.0, 0.5}) {
      if (k == 3 && tau == 0.5) continue;
      ExperimentReport r;
      r.name = "density_sweep";
      r.extra("kappa", k);
      r.extra("tau", tau);
      r.measured = k + tau;
      reps.push_back(r);
    }
  const auto t = theta_tau_table(reps);
  std::istringstream is(t);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);  // header, kappa 2, kappa 3
  EXPECT_EQ(std::count(lines[0].begin(), lines[0].end(), ','), 2);
  EXPECT_EQ(lines[2].back(), ',');  // the missing pair is an empty cell
}

TEST(RunConfig, MinimalIdentity) {
  auto c = parse_config("[run]\nexperiment = identity\n[model]\neps = 1e-2\n[grid]\nn = 513\n", true);
  const auto dir = scratch("minimal");
  EXPECT_EQ(cli::run_config(c, dir), 0);
  EXPECT_EQ(slurp(dir / "index.txt"), "000_identity_experiment.csv\n");
}

TEST(RunConfig, ThreeEpsInOrder) {
  const auto c = quick_identity();
  const auto dir = scratch("three");
  const auto reps = cli::run_experiment(c, dir);
  ASSERT_EQ(reps.size(), 3u);
  const char* expect[] = {"0.01", "0.005", "0.002"};
  for (std::size_t q = 0; q < 3; ++q) {
    bool seed = false, eps = false;
    for (const auto& [k, v] : reps[q].inputs) {
      seed = seed || (k == "seed" && v == "5");
      eps = eps || (k == "eps" && v == expect[q]);
    }
    EXPECT_TRUE(seed) << q;
    EXPECT_TRUE(eps) << q;
  }
}

// Rerunning a config rewrites every data file byte for byte; only run.log
// grows.
TEST(RunConfig, Idempotent) {
  const auto c = quick_identity();
  const auto dir = scratch("idem");
  ASSERT_EQ(cli::run_config(c, dir), 0);
  std::map<std::string, std::string> first;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "run.log") first[e.path().filename().string()] = slurp(e.path());
  const auto log1 = slurp(dir / "run.log");
  ASSERT_EQ(cli::run_config(c, dir), 0);
  std::size_t seen = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name == "run.log") continue;
    ASSERT_TRUE(first.count(name)) << name;
    EXPECT_EQ(slurp(e.path()), first[name]) << name;
    ++seen;
  }
  EXPECT_EQ(seen, first.size());
  EXPECT_GT(slurp(dir / "run.log").size(), log1.size());
}

// At eps = 0.2 the ball B_{1/2} is only 2.5 cores wide and eta*/pi is far
// from 1, so the clearing report fails.
TEST(RunConfig, FailingReportGivesNonzero) {
  auto c = parse_config("[run]\nexperiment = clearing\n[model]\neps = 0.3, 0.2\n", true);
  const auto dir = scratch("fail");
  const auto reps = cli::run_experiment(c, dir);
  ASSERT_FALSE(reps.empty());
  EXPECT_FALSE(reps[0].pass) << reps[0].measured;
  EXPECT_EQ(cli::run_config(c, dir), 1);
}

TEST(RunConfig, ClearingConfigFromDisk) {
  const char* dir = std::getenv("GLV_CONFIG_DIR");
  if (!dir) GTEST_SKIP() << "GLV_CONFIG_DIR not set";
  const auto c = load_config(fs::path(dir) / "clearing.ini", true);
  const auto out = scratch("clearing");
  EXPECT_EQ(cli::run_config(c, out), 0);
  EXPECT_TRUE(fs::exists(out / "000_clearing_threshold_clearing_trend.csv"));
}

TEST(RunConfig, MonotonicityTable) {
  auto c = parse_config(
      "[run]\nexperiment = monotonicity\n[model]\neps = 0.1\n[grid]\nn = 65\nradius = 1\n"
      "[solver]\nresidual_tol = 1e-8\n[audit]\nradii = 0.25, 0.5, 0.75\n",
      true);
  const auto dir = scratch("mono");
  cli::run_config(c, dir);
  bool table = false;
  for (const auto& e : fs::directory_iterator(dir))
    table = table || e.path().filename().string().find("radius_profile") != std::string::npos;
  EXPECT_TRUE(table);
}
