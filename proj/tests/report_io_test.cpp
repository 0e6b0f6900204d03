/*
 * Copyright 2026 The lwuq Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <sstream>

#include "lwuq/report_io.hpp"
#include "support.hpp"

namespace lwuq {
namespace {

TEST(FeaturesCsv, HeaderAndRows) {
  const std::vector<UqFeatureVector> f = {{4, {1, 0}, {0.5, 0.25, 0.0}, 0.75, true},
                                          {9, {0, 0}, {0.0, 0.0, 1.5}, 0.125, std::nullopt}};
  std::ostringstream out;
  write_features_csv(out, f);
  EXPECT_EQ(out.str(),
            "query_id,correct,sm,dc_1,dc_2,lu_0,lu_1,lu_2\n"
            "4,1,0.75,1,0,0.5,0.25,0\n"
            "9,,0.125,0,0,0,0,1.5\n");
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(0.950271010130)), 0.950271010130);
}

TEST(PbatJsonl, Fields) {
  PredictionBehaviorTable t;
  t.query_id = 3;
  t.k = 2;
  t.rows = {{{10, 1, 0.5}, {11, 1, 0.75}}, {{12, 2, 0.25}, {10, 1, 0.5}}};
  t.zero_norm_pairs = {0, 1};
  const std::vector<PredictionBehaviorTable> tables{t};
  std::ostringstream bc, cos;
  write_pbat_jsonl(bc, tables, DistanceKind::BrayCurtis);
  write_pbat_jsonl(cos, tables, DistanceKind::Cosine);
  const auto j = nlohmann::json::parse(bc.str());
  EXPECT_EQ(j["query_id"], 3);
  EXPECT_EQ(j["modes"], (std::vector<int>{1, 2}));
  EXPECT_EQ(j["decision_changes"], 1);
  EXPECT_EQ(j["layers"][1][0]["id"], 12);
  EXPECT_EQ(j["layers"][1][0]["distance"], 0.25);
  EXPECT_FALSE(j.contains("zero_norm_pairs"));
  EXPECT_EQ(nlohmann::json::parse(cos.str())["zero_norm_pairs"], (std::vector<int>{0, 1}));
}

TEST(Tables, SweepMarksChosenK) {
  SweepResult s;
  s.rows = {{Measure::DC, 3, {}}, {Measure::DC, 5, {}}, {Measure::LU, 3, {}}, {Measure::LU, 5, {}}};
  s.rows[1].report.auroc = 0.8367;
  s.best_k_dc = 5;
  s.best_k_lu = 3;
  const auto table = format_sweep_table(s);
  EXPECT_NE(table.find("DC           5   83.67"), std::string::npos) << table;
  EXPECT_NE(table.find("83.67    0.00    0.00  *"), std::string::npos) << table;
  EXPECT_EQ(format_sweep_table(to_json(s)), table);
  const auto j = to_json(s);
  EXPECT_EQ(j["conventions"]["entropy"], "natural log (nats)");
  EXPECT_EQ(j["evaluated_on"], "validation");
}

TEST(Tables, FinalReportJson) {
  FinalReport f;
  f.k_dc = 3;
  f.k_lu = 20;
  ModelReport none;
  none.name = "None";
  none.report.auroc = 0.5;
  none.report.aupr_pos = 0.9839;
  none.report.aupr_neg = 0.0161;
  ModelReport lu;
  lu.name = "LU";
  lu.subset = FeatureSubsetSpec{false, false, true};
  f.models = {none, lu};
  const auto j = to_json(f);
  EXPECT_EQ(j["models"][1]["k_used"]["lu"], 20);
  EXPECT_TRUE(j["models"][1]["k_used"]["dc"].is_null());
  EXPECT_TRUE(j["models"][0]["k_used"]["lu"].is_null());
  EXPECT_EQ(j["models"][0]["distance"], "braycurtis");
  const auto table = format_final_table(f);
  EXPECT_NE(table.find("None         50.00   98.39    1.61"), std::string::npos) << table;
  EXPECT_NE(table.find("k=3 for DC, k=20 for LU"), std::string::npos);
}

}  // namespace
}  // namespace lwuq
