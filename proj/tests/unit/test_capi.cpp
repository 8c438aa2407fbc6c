#include <gtest/gtest.h>

#include <cstring>
#include <string>

#include "oralab/oralab.h"

TEST(CApi, VersionAndStatusNames) {
  EXPECT_NE(std::strlen(oralab_version()), 0u);
  EXPECT_STREQ(oralab_status_name(ORALAB_OK), "ok");
  EXPECT_STRNE(oralab_status_name(ORALAB_E_INVALID_CONFIG), "ok");
}

TEST(CApi, BadConfigReportsInvalidConfig) {
  oralab_scenario* s = nullptr;
  EXPECT_EQ(oralab_scenario_parse("{\"schema\": 1, \"bogus\": 2}", &s), ORALAB_E_INVALID_CONFIG);
  EXPECT_EQ(s, nullptr);
  EXPECT_NE(std::string(oralab_last_error()).find("bogus"), std::string::npos);
  EXPECT_NE(oralab_scenario_load("/nonexistent.json", &s), ORALAB_OK);
  EXPECT_EQ(oralab_scenario_parse(nullptr, &s), ORALAB_E_INVALID_ARGUMENT);
}

TEST(CApi, PresetScenarioAndBarrier) {
  oralab_scenario* s = nullptr;
  ASSERT_EQ(oralab_scenario_preset("rab-preset", &s), ORALAB_OK);
  oralab_model model = ORALAB_MODEL_RAQ;
  ASSERT_EQ(oralab_scenario_model(s, &model), ORALAB_OK);
  EXPECT_EQ(model, ORALAB_MODEL_RAB);
  char* text = nullptr;
  ASSERT_EQ(oralab_scenario_to_json(s, &text), ORALAB_OK);
  oralab_scenario* back = nullptr;
  ASSERT_EQ(oralab_scenario_parse(text, &back), ORALAB_OK);
  oralab_string_free(text);
  oralab_scenario_free(back);

  oralab_barrier* b = nullptr;
  ASSERT_EQ(oralab_barrier_solve(s, 0.3, 1e-3, &b), ORALAB_OK);
  const std::size_t steps = oralab_barrier_steps(b);
  EXPECT_GT(steps, 0u);
  double lower = 0.0, upper = 0.0;
  ASSERT_EQ(oralab_barrier_mass(b, steps, &lower, &upper), ORALAB_OK);
  EXPECT_NEAR(lower, 1.0, 1e-10);  // I == J
  EXPECT_GE(upper, lower);
  double gap = -1.0, bound = -1.0;
  ASSERT_EQ(oralab_barrier_gap(b, steps, &bound, &gap), ORALAB_OK);
  EXPECT_LE(gap, bound);
  double tail = -1.0;
  ASSERT_EQ(oralab_barrier_tail(b, 0.0, ORALAB_MID, -100.0, &tail), ORALAB_OK);
  EXPECT_NEAR(tail, 1.0, 1e-12);
  EXPECT_EQ(oralab_barrier_mass(b, steps + 1, &lower, &upper), ORALAB_E_INVALID_ARGUMENT);
  oralab_barrier_free(b);

  EXPECT_EQ(oralab_barrier_solve(s, 2.0, 1e-3, &b), ORALAB_E_DELTA_TOO_LARGE);
  oralab_scenario_free(s);
}

TEST(CApi, PresetCatalogue) {
  EXPECT_EQ(oralab_preset_count(), 10u);
  int id = 0;
  const char* name = nullptr;
  const char* summary = nullptr;
  ASSERT_EQ(oralab_preset_info(0, &id, &name, &summary), ORALAB_OK);
  EXPECT_EQ(id, 1);
  EXPECT_STREQ(name, "operator-laws");
  EXPECT_EQ(oralab_preset_info(10, &id, &name, &summary), ORALAB_E_INVALID_ARGUMENT);
  oralab_preset_result* r = nullptr;
  EXPECT_NE(oralab_preset_run("no-such-preset", 1, 0, &r), ORALAB_OK);
}
