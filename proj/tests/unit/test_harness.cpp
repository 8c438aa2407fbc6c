#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "oralab/error.hpp"
#include "oralab/harness.hpp"

using namespace oralab;
namespace fs = std::filesystem;

namespace {

Scenario small() {
  Scenario s = Scenario::load(fs::path(ORALAB_TEST_DATA) / "small_rab.json");
  s.Ns = {100};
  s.replicas = 2;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("oralab_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(ParallelFor, RunsEveryJobAndRethrowsTheLowestFailure) {
  for (unsigned threads : {1u, 3u}) {
    std::atomic<int> sum{0};
    parallel_for(10, threads, [&](std::size_t i) { sum += static_cast<int>(i); });
    EXPECT_EQ(sum.load(), 45);
  }
  try {
    parallel_for(8, 1, [](std::size_t i) {
      if (i >= 3) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "3");
  }
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1e-7), "1e-07");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(RunScenario, SweepIsReproducibleAcrossThreadCounts) {
  const Scenario s = small();
  HarnessOptions a;
  a.out_dir = fresh("a");
  a.threads = 1;
  HarnessOptions b = a;
  b.out_dir = fresh("b");
  b.threads = 2;
  run_scenario(s, Task::Sweep, a);
  run_scenario(s, Task::Sweep, b);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(a.out_dir)) {
    const fs::path other = b.out_dir / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
    ++compared;
  }
  EXPECT_GT(compared, 8u);
  for (const char* f : {"gap.csv", "comparison.csv", "coupled.csv", "dominance.csv", "ora.csv",
                        "plot_gap.csv", "warnings.csv"}) {
    EXPECT_TRUE(fs::exists(a.out_dir / f)) << f;
  }

  const auto m = nlohmann::json::parse(slurp(a.out_dir / "manifest.json"));
  EXPECT_EQ(m["schema"], 1);
  EXPECT_EQ(m["task"], to_string(Task::Sweep));
  EXPECT_EQ(m["seed"], 11);
  EXPECT_EQ(m["cells"].size(), 2u + 2u);
  EXPECT_EQ(m["config"]["name"], "small-rab");
  EXPECT_EQ(m["config_hash"].get<std::string>().rfind("fnv1a64:", 0), 0u);
}

TEST(RunScenario, SeedOverrideChangesTraces) {
  const Scenario s = small();
  HarnessOptions a;
  a.out_dir = fresh("seed_a");
  HarnessOptions b = a;
  b.out_dir = fresh("seed_b");
  b.seed = 99;
  run_scenario(s, Task::Simulate, a);
  run_scenario(s, Task::Simulate, b);
  EXPECT_NE(slurp(a.out_dir / "simulations.csv"), slurp(b.out_dir / "simulations.csv"));
}

TEST(RunScenario, StrictModeEscalatesWarnings) {
  Scenario s = Scenario::load(fs::path(ORALAB_TEST_DATA) / "clipped_rab.json");
  HarnessOptions o;
  o.out_dir = fresh("strict");
  EXPECT_NO_THROW(run_scenario(s, Task::Solve, o));
  EXPECT_NE(slurp(o.out_dir / "warnings.csv").find('\n'), slurp(o.out_dir / "warnings.csv").size() - 1);
  o.strict = true;
  o.out_dir = fresh("strict2");
  EXPECT_THROW(run_scenario(s, Task::Solve, o), Error);
}

TEST(CompareModels, RaqCrossModelWithinBound) {
  const Scenario s = Scenario::load(fs::path(ORALAB_TEST_DATA) / "small_raq.json");
  HarnessOptions o;
  const ComparisonReport rep = compare_models(s, o);
  ASSERT_FALSE(rep.cross_model.empty());
  for (const CrossModelRow& r : rep.cross_model) EXPECT_LE(r.mid, r.bound) << r.t;
  EXPECT_FALSE(rep.rows.empty());
}

TEST(EmitPlots, EmptyDirectoryIsHarmless) {
  const fs::path p = fresh("plots");
  fs::create_directories(p);
  EXPECT_NO_THROW(emit_plots(p));
}
