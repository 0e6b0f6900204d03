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

#include <algorithm>
#include <cmath>
#include <set>

#include "lwuq/experiment.hpp"
#include "lwuq/report_io.hpp"
#include "lwuq/synthetic.hpp"
#include "support.hpp"

namespace lwuq {
namespace {

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.num_classes = 5;
  s.dims = {16, 16, 16};
  s.separation = {2.0, 2.5, 3.0};
  s.noise = 0.5;
  s.latent_noise = 0.45;
  s.n_train = 600;
  s.n_query = 300;
  s.seed = 5;
  return s;
}

struct Fixture {
  SyntheticData data;
  TrainingActivationRepository tar;
};

Fixture make_fixture(const SyntheticSpec& spec) {
  Fixture f{generate_synthetic(spec), {}};
  f.tar = build_tar(f.data.repository.traces, f.data.repository.header);
  return f;
}

double mean_lu(const Fixture& f, std::size_t k, std::size_t layer) {
  double total = 0.0;
  for (const auto& q : f.data.queries.traces) {
    const auto pbat = build_pbat(f.tar, q, k, DistanceKind::BrayCurtis);
    total += layer_entropy(pbat.rows[layer], f.tar.num_classes());
  }
  return total / static_cast<double>(f.data.queries.traces.size());
}

double accuracy(const Dataset& queries) {
  double correct = 0.0;
  for (const auto& t : queries.traces) correct += t.is_correct() ? 1.0 : 0.0;
  return correct / static_cast<double>(queries.traces.size());
}

TEST(Synthetic, DeterministicAndWellFormed) {
  const auto a = generate_synthetic(small_spec());
  const auto b = generate_synthetic(small_spec());
  EXPECT_TRUE(bit_equal(a.repository, b.repository));
  EXPECT_TRUE(bit_equal(a.queries, b.queries));
  EXPECT_NO_THROW(validate_dataset(a.repository));
  EXPECT_NO_THROW(validate_dataset(a.queries));
  EXPECT_EQ(a.queries.traces.front().sample_id, 600u);
  EXPECT_EQ(a.repository.traces[7].true_label, 2);
  auto other = small_spec();
  other.seed = 6;
  EXPECT_FALSE(bit_equal(generate_synthetic(other).queries, a.queries));
}

TEST(Synthetic, ConfidenceDecreasesWithAmbiguity) {
  // Higher confidence should go with more correct predictions.
  const auto data = generate_synthetic(small_spec());
  std::vector<ScoredSample> s;
  for (const auto& t : data.queries.traces) s.push_back({*t.softmax_confidence, t.is_correct()});
  EXPECT_GT(auroc(s), 0.55);
}

TEST(Synthetic, NoSeparationMeansNoSignal) {
  auto spec = small_spec();
  spec.num_classes = 10;
  spec.separation = {0.0, 0.0, 0.0};
  spec.latent_noise = 0.0;
  spec.n_train = 2000;
  spec.n_query = 400;
  const auto f = make_fixture(spec);
  EXPECT_NEAR(accuracy(f.data.queries), 0.1, 0.05);
  EXPECT_NEAR(mean_lu(f, 50, 1), std::log(10.0), 0.15);
}

TEST(Synthetic, LargeSeparationIsClean) {
  auto spec = small_spec();
  spec.separation = {40.0, 40.0, 40.0};
  spec.latent_noise = 0.0;
  const auto f = make_fixture(spec);
  EXPECT_GT(accuracy(f.data.queries), 0.99);
  EXPECT_LT(mean_lu(f, 10, 0), 0.01);
  for (const auto& q : f.data.queries.traces) {
    const auto feat = build_features(build_pbat(f.tar, q, 10, DistanceKind::BrayCurtis),
                                     query_meta(q), f.tar.num_classes());
    EXPECT_EQ(feat.decision_changes(), 0u);
  }
}

TEST(Synthetic, NarrowLayersStillSeparate) {
  auto spec = small_spec();
  spec.dims = {3, 2, 16};
  spec.separation = {30.0, 30.0, 30.0};
  spec.latent_noise = 0.0;
  const auto f = make_fixture(spec);
  EXPECT_LT(mean_lu(f, 5, 1), 0.05);
}

// Per-layer means over queries of the two swapped classes.
struct SwapStats {
  std::size_t swapped = 0;
  double dc_in = 0.0, dc_out = 0.0;
  double lu[3] = {0, 0, 0};
};

SwapStats swap_stats(double mix) {
  auto spec = small_spec();
  spec.separation = {6.0, 6.0, 6.0};
  spec.latent_noise = 0.0;
  spec.swaps = {{1, 0, 1, mix}};
  const auto f = make_fixture(spec);
  SwapStats st;
  for (const auto& q : f.data.queries.traces) {
    if (q.true_label > 1) continue;
    ++st.swapped;
    const auto pbat = build_pbat(f.tar, q, 10, DistanceKind::BrayCurtis);
    const auto feat = build_features(pbat, query_meta(q), f.tar.num_classes());
    st.dc_in += feat.dc[0];
    st.dc_out += feat.dc[1];
    for (std::size_t l = 0; l < 3; ++l) st.lu[l] += feat.lu[l];
  }
  if (st.swapped > 0) {
    const double n = static_cast<double>(st.swapped);
    st.dc_in /= n;
    st.dc_out /= n;
    for (double& v : st.lu) v /= n;
  }
  return st;
}

// Queries pushed most of the way to the other anchor flip the mode in and out.
TEST(Synthetic, AnchorSwapFiresDecisionChange) {
  const auto st = swap_stats(0.25);
  ASSERT_GT(st.swapped, 0u);
  EXPECT_GT(st.dc_in, 0.9);
  EXPECT_GT(st.dc_out, 0.9);
}

// Halfway between two anchors the neighborhood mixes both classes.
TEST(Synthetic, AnchorMidpointRaisesEntropy) {
  const auto st = swap_stats(0.5);
  ASSERT_GT(st.swapped, 0u);
  EXPECT_GT(st.lu[1], st.lu[0] + 0.1);
  EXPECT_GT(st.lu[1], st.lu[2] + 0.1);
}

TEST(Synthetic, InvalidSpecs) {
  auto s = small_spec();
  s.separation = {1.0};
  EXPECT_LWUQ_ERROR(s.validate(), ErrorCode::InvalidSpec);
  s = small_spec();
  s.num_classes = 1;
  EXPECT_LWUQ_ERROR(s.validate(), ErrorCode::InvalidSpec);
  s = small_spec();
  s.swaps = {{0, 2, 2, 0.5}};
  EXPECT_LWUQ_ERROR(s.validate(), ErrorCode::InvalidSpec);
  s = small_spec();
  s.n_query = 0;
  EXPECT_LWUQ_ERROR(s.validate(), ErrorCode::InvalidSpec);
}

TEST(Synthetic, JsonRoundTripAndFieldErrors) {
  auto s = small_spec();
  s.swaps = {{1, 0, 3, 0.4}};
  const auto back = synthetic_spec_from_json(to_json(s));
  EXPECT_EQ(to_json(back).dump(), to_json(s).dump());
  try {
    synthetic_spec_from_json(nlohmann::json{{"noise", "loud"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    EXPECT_NE(std::string(e.what()).find("noise"), std::string::npos);
  }
}

TEST(SweepConfig, JsonFieldErrors) {
  SweepConfig c;
  c.k_values = {3, 7};
  c.distance = DistanceKind::Cosine;
  c.seed = 99;
  const auto back = sweep_config_from_json(to_json(c));
  EXPECT_EQ(back.k_values, c.k_values);
  EXPECT_EQ(back.distance, c.distance);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_LWUQ_ERROR(sweep_config_from_json(nlohmann::json{{"kk", 1}}), ErrorCode::InvalidConfig);
  EXPECT_LWUQ_ERROR(sweep_config_from_json(nlohmann::json{{"k_values", {0}}}), ErrorCode::InvalidConfig);
  EXPECT_LWUQ_ERROR(sweep_config_from_json(nlohmann::json{{"distance", "l1"}}), ErrorCode::InvalidConfig);
}

TEST(Sweep, SingleKSelected) {
  const auto f = make_fixture(small_spec());
  SweepConfig c;
  c.k_values = {3};
  const auto r = run_sweep(f.tar, f.data.queries.traces, c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].measure, Measure::DC);
  EXPECT_EQ(r.rows[1].measure, Measure::LU);
  EXPECT_EQ(r.best_k_dc, 3u);
  EXPECT_EQ(r.best_k_lu, 3u);
}

TEST(Sweep, BestKMaximizesValidationMetricWithSmallerKOnTies) {
  const auto f = make_fixture(small_spec());
  SweepConfig c;
  const auto r = run_sweep(f.tar, f.data.queries.traces, c);
  ASSERT_EQ(r.rows.size(), 8u);
  for (auto m : {Measure::DC, Measure::LU}) {
    double best = -1.0;
    std::size_t best_k = 0;
    for (const auto& row : r.rows) {
      if (row.measure == m && row.report.auroc > best) {
        best = row.report.auroc;
        best_k = row.k;
      }
    }
    EXPECT_EQ(m == Measure::DC ? r.best_k_dc : r.best_k_lu, best_k);
  }
  // Every row reports on the validation split.
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.report.n_pos + row.report.n_neg, r.splits.validation.size());
  }
}

TEST(Sweep, LargerNeighborhoodsDenoiseLabels) {
  auto spec = small_spec();
  spec.num_classes = 10;
  spec.dims = {32, 32, 32, 32};
  spec.separation = {2.0, 2.5, 3.0, 3.0};
  spec.label_noise = 0.2;
  spec.n_train = 3000;
  spec.n_query = 1500;
  const auto f = make_fixture(spec);
  SweepConfig c;
  const auto r = run_sweep(f.tar, f.data.queries.traces, c);
  std::vector<double> lu;
  for (const auto& row : r.rows) {
    if (row.measure == Measure::LU) lu.push_back(row.report.auroc);
  }
  ASSERT_EQ(lu.size(), 4u);
  EXPECT_GE(lu.back(), lu.front());
  for (std::size_t i = 1; i < lu.size(); ++i) EXPECT_GE(lu[i], lu[i - 1] - 0.01);
}

TEST(Sweep, AllCorrectValidationIsSingleClass) {
  auto spec = small_spec();
  spec.separation = {40.0, 40.0, 40.0};
  spec.latent_noise = 0.0;
  const auto f = make_fixture(spec);
  ASSERT_EQ(accuracy(f.data.queries), 1.0);
  SweepConfig c;
  c.k_values = {3};
  EXPECT_LWUQ_ERROR(run_sweep(f.tar, f.data.queries.traces, c), ErrorCode::SingleClassTarget);
}

TEST(Sweep, ValidationWithOnlyCorrectPredictionsIsSingleClass) {
  auto f = make_fixture(small_spec());
  auto queries = f.data.queries.traces;
  SweepConfig c;
  c.k_values = {3};
  const auto split = split_dataset(queries.size(), c.fractions, c.seed);
  for (auto& q : queries) q.predicted_label = static_cast<ClassId>((q.true_label + 1) % 5);
  for (std::size_t i = 0; i < split.train.size(); i += 2) {
    queries[split.train[i]].predicted_label = queries[split.train[i]].true_label;
  }
  for (std::size_t i : split.validation) queries[i].predicted_label = queries[i].true_label;
  EXPECT_LWUQ_ERROR(run_sweep(f.tar, queries, c), ErrorCode::SingleClass);
}

TEST(Final, ModelsBaselinesAndSplitDiscipline) {
  const auto f = make_fixture(small_spec());
  SweepConfig c;
  c.seed = 17;
  const auto r = run_final(f.tar, f.data.queries.traces, 3, 10, c);
  std::vector<std::string> names;
  for (const auto& m : r.models) names.push_back(m.name);
  EXPECT_EQ(names, (std::vector<std::string>{"None", "SM", "DC", "LU", "DC+LU", "SM+DC+LU"}));

  double correct = 0.0;
  for (std::size_t i : r.splits.test) correct += f.data.queries.traces[i].is_correct() ? 1.0 : 0.0;
  const double prevalence = correct / static_cast<double>(r.splits.test.size());
  const auto& none = r.models[0].report;
  EXPECT_EQ(none.auroc, 0.5);
  EXPECT_DOUBLE_EQ(none.aupr_pos, prevalence);
  EXPECT_DOUBLE_EQ(none.aupr_neg, 1.0 - prevalence);

  // SM alone ranks the test queries exactly like the raw confidence.
  std::vector<ScoredSample> raw;
  for (std::size_t i : r.splits.test) {
    const auto& t = f.data.queries.traces[i];
    raw.push_back({*t.softmax_confidence, t.is_correct()});
  }
  EXPECT_EQ(r.models[1].report.auroc, auroc(raw));

  std::set<std::size_t> fit_rows(r.splits.train.begin(), r.splits.train.end());
  fit_rows.insert(r.splits.validation.begin(), r.splits.validation.end());
  for (std::size_t i : r.splits.test) EXPECT_EQ(fit_rows.count(i), 0u);
  for (const auto& m : r.models) {
    EXPECT_EQ(m.report.n_pos + m.report.n_neg, r.splits.test.size());
  }
  EXPECT_EQ(r.models[2].columns.size(), 2u);
  EXPECT_EQ(r.models[5].columns.size(), 1u + 2u + 3u);
}

TEST(Final, ReportsAreByteIdenticalAcrossRuns) {
  const auto f = make_fixture(small_spec());
  SweepConfig c;
  c.threads = 3;
  const auto s1 = to_json(run_sweep(f.tar, f.data.queries.traces, c)).dump();
  c.threads = 1;
  const auto s2 = to_json(run_sweep(f.tar, f.data.queries.traces, c)).dump();
  const auto f1 = to_json(run_final(f.tar, f.data.queries.traces, 5, 5, c)).dump();
  const auto f2 = to_json(run_final(f.tar, f.data.queries.traces, 5, 5, c)).dump();
  EXPECT_EQ(f1, f2);
  EXPECT_EQ(s1, s2);
}

TEST(FeatureBank, TruncatedFeaturesEqualDirectScoring) {
  const auto f = make_fixture(small_spec());
  const std::vector<std::size_t> ks{20, 3, 7};
  const auto bank = compute_feature_bank(f.tar, f.data.queries.traces, ks, DistanceKind::BrayCurtis, 2);
  const auto direct = score_queries(f.tar, f.data.queries.traces, 7, DistanceKind::BrayCurtis);
  const auto& at7 = bank.at(7);
  for (std::size_t i = 0; i < direct.size(); ++i) {
    const auto want = build_features(direct[i], query_meta(f.data.queries.traces[i]), f.tar.num_classes());
    EXPECT_EQ(at7[i].dc, want.dc);
    EXPECT_EQ(at7[i].lu, want.lu);
  }
}

}  // namespace
}  // namespace lwuq
