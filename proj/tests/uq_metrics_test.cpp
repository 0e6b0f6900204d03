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
#include <numeric>
#include <random>

#include "lwuq/uq_metrics.hpp"
#include "support.hpp"

namespace lwuq {
namespace {

using testing::entropy_oracle;
using testing::row_of;

std::vector<NeighborRecord> row_with(const std::vector<int>& labels, const std::vector<double>& d) {
  auto row = row_of(labels);
  for (std::size_t i = 0; i < row.size(); ++i) row[i].distance = d[i];
  return row;
}

TEST(DominantClass, Unanimous) {
  const auto r = dominant_class(row_of({9, 9, 9, 9, 7}));
  EXPECT_EQ(r.label, 9);
  EXPECT_FALSE(r.tied);
}

TEST(DominantClass, TieBrokenByDistanceSum) {
  // Class 6 sums to 1.0, class 0 to 1.4.
  const auto r = dominant_class(row_with({6, 6, 0, 0, 3}, {0.3, 0.7, 0.6, 0.8, 0.9}));
  EXPECT_EQ(r.label, 6);
  EXPECT_TRUE(r.tied);
  const auto s = dominant_class(row_with({6, 6, 0, 0, 3}, {0.5, 0.9, 0.2, 0.3, 0.95}));
  EXPECT_EQ(s.label, 0);
}

TEST(DominantClass, EqualSumsFallBackToSmallestId) {
  const auto r = dominant_class(row_with({5, 2, 5, 2}, {0.25, 0.5, 0.5, 0.25}));
  EXPECT_EQ(r.label, 2);
  EXPECT_TRUE(r.tied);
}

TEST(DominantClass, SingleRecordAndEmpty) {
  const auto r = dominant_class(row_of({4}));
  EXPECT_EQ(r.label, 4);
  EXPECT_FALSE(r.tied);
  EXPECT_LWUQ_ERROR(dominant_class({}), ErrorCode::EmptyRow);
}

TEST(DominantClassProperty, PermutationInvariant) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> label(0, 3);
  std::uniform_int_distribution<int> dist(0, 4);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<NeighborRecord> row;
    for (SampleId i = 0; i < 8; ++i) {
      row.push_back({i, static_cast<ClassId>(label(rng)), 0.125 * dist(rng)});
    }
    const auto base = dominant_class(row);
    std::shuffle(row.begin(), row.end(), rng);
    const auto again = dominant_class(row);
    EXPECT_EQ(base.label, again.label);
    EXPECT_EQ(base.tied, again.tied);
  }
}

TEST(DecisionChange, Examples) {
  using M = std::vector<ClassId>;
  EXPECT_EQ(decision_change_vector(M{8, 8, 9, 9, 9}), (std::vector<std::uint8_t>{0, 1, 0, 0}));
  EXPECT_EQ(decision_change_vector(M{3, 3, 3}), (std::vector<std::uint8_t>{0, 0}));
  EXPECT_EQ(decision_change_vector(M{1, 2, 1, 2}), (std::vector<std::uint8_t>{1, 1, 1}));
  EXPECT_TRUE(decision_change_vector(M{4}).empty());
}

TEST(DecisionChangeProperty, RelabelingInvariant) {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<int> label(0, 9);
  std::vector<ClassId> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ClassId> modes(6);
    for (auto& m : modes) m = static_cast<ClassId>(label(rng));
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ClassId> mapped(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) mapped[i] = perm[modes[i]];
    EXPECT_EQ(decision_change_vector(modes), decision_change_vector(mapped));
  }
}

TEST(Entropy, MnistRows) {
  EXPECT_NEAR(layer_entropy(row_of({8, 4, 8, 8, 9}), 10), 0.950271, 1e-6);
  EXPECT_NEAR(layer_entropy(row_of({9, 9, 9, 9, 7}), 10), 0.500402, 1e-6);
  const double direct = -(0.6 * std::log(0.6) + 2 * 0.2 * std::log(0.2));
  EXPECT_NEAR(layer_entropy(row_of({8, 4, 8, 8, 9}), 10), direct, 1e-12);
}

TEST(Entropy, ExtremesAndErrors) {
  EXPECT_EQ(layer_entropy(row_of({3, 3, 3, 3}), 10), 0.0);
  std::vector<int> uniform;
  for (int i = 0; i < 20; ++i) uniform.push_back(i % 10);
  EXPECT_NEAR(layer_entropy(row_of(uniform), 10), std::log(10.0), 1e-12);
  EXPECT_LE(layer_entropy(row_of(uniform), 10), std::log(10.0));
  EXPECT_LWUQ_ERROR(layer_entropy({}, 10), ErrorCode::EmptyRow);
  EXPECT_LWUQ_ERROR(layer_entropy(row_of({1, 10}), 10), ErrorCode::LabelOutOfRange);
}

TEST(EntropyProperty, OracleBoundsAndInvariances) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::size_t C = 2 + trial % 12;
    const std::size_t k = 1 + (trial * 7) % 40;
    std::uniform_int_distribution<int> label(0, static_cast<int>(C) - 1);
    std::vector<int> labels(k);
    for (auto& l : labels) l = label(rng);
    const double h = layer_entropy(row_of(labels), C);
    EXPECT_NEAR(h, entropy_oracle(labels), 1e-12);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(static_cast<double>(C)));
    const bool single = std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels[0]; });
    EXPECT_EQ(h == 0.0, single);

    auto shuffled = labels;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(layer_entropy(row_of(shuffled), C), h);
    std::vector<int> perm(C);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto relabeled = labels;
    for (auto& l : relabeled) l = perm[l];
    EXPECT_EQ(layer_entropy(row_of(relabeled), C), h);
  }
}

PredictionBehaviorTable table_of(const std::vector<std::vector<int>>& layers) {
  PredictionBehaviorTable t;
  t.query_id = 77;
  t.k = layers.front().size();
  for (const auto& l : layers) t.rows.push_back(row_of(l));
  t.zero_norm_pairs.assign(layers.size(), 0);
  return t;
}

TEST(Features, StableNeighborhood) {
  const auto t = table_of({{2, 2, 2}, {2, 2, 2}, {2, 2, 2}});
  const auto f = build_features(t, {0.9, 2, 2}, 5);
  EXPECT_EQ(f.dc, (std::vector<std::uint8_t>{0, 0}));
  EXPECT_EQ(f.lu, (std::vector<double>{0.0, 0.0, 0.0}));
  ASSERT_TRUE(f.correct.has_value());
  EXPECT_TRUE(*f.correct);
  EXPECT_EQ(f.query_id, 77u);
}

TEST(Features, MnistFragment) {
  const auto t = table_of({{8, 4, 8, 8, 9}, {9, 9, 9, 9, 7}});
  const auto f = build_features(t, {0.8, 9, 9}, 10);
  EXPECT_EQ(f.dc, (std::vector<std::uint8_t>{1}));
  ASSERT_EQ(f.lu.size(), 2u);
  EXPECT_NEAR(f.lu[0], 0.950271, 1e-6);
  EXPECT_NEAR(f.lu[1], 0.500402, 1e-6);
  EXPECT_EQ(f.decision_changes(), 1u);
}

TEST(Features, ShapesAndCorrectness) {
  std::mt19937_64 rng(34);
  std::uniform_int_distribution<int> label(0, 9);
  std::vector<std::vector<int>> layers(4, std::vector<int>(10));
  for (auto& l : layers) {
    for (auto& x : l) x = label(rng);
  }
  const auto t = table_of(layers);
  const auto f = build_features(t, {0.3, 1, 2}, 10);
  EXPECT_EQ(f.dc.size(), 3u);
  EXPECT_EQ(f.lu.size(), 4u);
  EXPECT_FALSE(*f.correct);
  const auto unknown = build_features(t, {0.3, std::nullopt, std::nullopt}, 10);
  EXPECT_FALSE(unknown.correct.has_value());
  EXPECT_LWUQ_ERROR(build_features(t, {1.5, 1, 1}, 10), ErrorCode::NonFiniteValue);
}

}  // namespace
}  // namespace lwuq
