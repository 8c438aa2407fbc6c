#include <gtest/gtest.h>

#include <string>

#include "oralab/error.hpp"
#include "oralab/presets.hpp"
#include "oralab/scenario.hpp"

using namespace oralab;

namespace {

const std::string kSmall = R"({
  "schema": 1, "name": "t", "model": "rab",
  "grid": {"x_min": -4.0, "x_max": 5.0, "n_cells": 512},
  "u0": {"kind": "uniform", "a": 0.0, "b": 1.0},
  "pi": {"atoms": [{"x": 0.0, "weight": 1.0}]},
  "I": {"kind": "linear", "rate": 1.0},
  "J": {"kind": "linear", "rate": 1.0},
  "horizon": 0.3,
  "solver": {"Delta": [0.2], "delta": [0.002, 0.001]},
  "simulation": {"N": [200], "replicas": 2, "seed": 11},
  "outputs": {"snapshot_times": [0.1, 0.3], "r_count": 32}
})";

ErrorCode code_of(const std::string& text) {
  try {
    Scenario::parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;  // sentinel: parsed fine
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST(Scenario, ParsesAndRoundTrips) {
  const Scenario s = Scenario::parse(kSmall);
  EXPECT_EQ(s.model, Model::Rab);
  EXPECT_EQ(s.grid.n_cells, 512u);
  EXPECT_EQ(s.Ns, std::vector<std::size_t>{200});
  EXPECT_EQ(s.seed, 11u);
  ASSERT_EQ(s.solver_cells().size(), 2u);
  EXPECT_DOUBLE_EQ(s.solver_cells()[1].second, 0.001);
  const std::string canon = s.to_json();
  EXPECT_EQ(Scenario::parse(canon).to_json(), canon);
  const RabData d = s.rab_data();
  EXPECT_DOUBLE_EQ(d.J(0.3), 0.3);
  EXPECT_NEAR(d.u0.total_mass(), 1.0, 1e-12);
}

TEST(Scenario, DefaultDeltaPerDelta) {
  const Scenario s = Scenario::parse(replace(kSmall, R"(, "delta": [0.002, 0.001])", ""));
  ASSERT_EQ(s.solver_cells().size(), 1u);
  EXPECT_DOUBLE_EQ(s.solver_cells()[0].second, default_delta(0.2));
}

TEST(Scenario, RejectsBadDocuments) {
  EXPECT_EQ(code_of(replace(kSmall, R"("name": "t",)", R"("name": "t", "bogus": 1,)")),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(replace(kSmall, R"("schema": 1)", R"("schema": 2)")), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(replace(kSmall, R"("horizon": 0.3)", R"("horizon": -1)")),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(replace(kSmall, R"("replicas": 2)", R"("replicas": 0)")),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(replace(kSmall, R"([0.1, 0.3])", R"([0.1, 0.5])")), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(replace(kSmall, R"("rate": 1.0})", R"("rate": "x"})")),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(replace(kSmall, R"("a": 0.0, "b": 1.0})", R"("a": 0.0, "b": 1.0, "c": 2})")),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of("{not json"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of(replace(kSmall, R"("outputs")",
                            R"("comparison": {"dominance_J_factor": 0.5}, "outputs")")),
            ErrorCode::InvalidConfig);
  EXPECT_THROW(Scenario::load("/nonexistent/config.json"), Error);
}

TEST(Scenario, PresetScenariosAreValid) {
  for (const char* name : {"rab-preset", "raq-preset"}) {
    const Scenario s = preset_scenario(name);
    s.validate();
    EXPECT_EQ(Scenario::parse(s.to_json()).to_json(), s.to_json());
  }
  EXPECT_EQ(preset_scenario("raq-preset").model, Model::Raq);
  EXPECT_THROW(preset_scenario("nope"), Error);
}
