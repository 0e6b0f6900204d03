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

#include "lwuq/uq_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lwuq/error.hpp"

namespace lwuq {

namespace {

struct LabelGroup {
  ClassId label;
  std::size_t count;
  double distance_sum;
};

// Groups a row by label. Distances are summed in ascending order so that the
// sum does not depend on the row's ordering.
std::vector<LabelGroup> group_labels(std::span<const NeighborRecord> row) {
  std::vector<std::pair<ClassId, double>> items;
  items.reserve(row.size());
  for (const auto& rec : row) items.emplace_back(rec.label, rec.distance);
  std::sort(items.begin(), items.end());

  std::vector<LabelGroup> groups;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < items.size() && items[j].first == items[i].first) sum += items[j++].second;
    groups.push_back({items[i].first, j - i, sum});
    i = j;
  }
  return groups;
}

}  // namespace

std::size_t UqFeatureVector::decision_changes() const {
  return static_cast<std::size_t>(std::count(dc.begin(), dc.end(), std::uint8_t{1}));
}

DominantClass dominant_class(std::span<const NeighborRecord> row) {
  if (row.empty()) fail(ErrorCode::EmptyRow, "dominant_class needs at least one neighbor");
  const auto groups = group_labels(row);
  std::size_t top = 0;
  for (const auto& g : groups) top = std::max(top, g.count);

  const LabelGroup* best = nullptr;
  std::size_t tied = 0;
  for (const auto& g : groups) {
    if (g.count != top) continue;
    ++tied;
    // Groups are in ascending label order, so strict < keeps the smaller id.
    if (best == nullptr || g.distance_sum < best->distance_sum) best = &g;
  }
  return {best->label, tied > 1};
}

DominantClassSequence dominant_classes(const PredictionBehaviorTable& pbat) {
  DominantClassSequence seq;
  seq.modes.reserve(pbat.rows.size());
  seq.tie_flags.reserve(pbat.rows.size());
  for (const auto& row : pbat.rows) {
    const DominantClass d = dominant_class(row);
    seq.modes.push_back(d.label);
    seq.tie_flags.push_back(d.tied);
  }
  return seq;
}

std::vector<std::uint8_t> decision_change_vector(std::span<const ClassId> modes) {
  std::vector<std::uint8_t> dc;
  if (modes.size() < 2) return dc;
  dc.reserve(modes.size() - 1);
  for (std::size_t t = 0; t + 1 < modes.size(); ++t) {
    dc.push_back(modes[t + 1] != modes[t] ? 1 : 0);
  }
  return dc;
}

double layer_entropy(std::span<const NeighborRecord> row, std::size_t num_classes) {
  if (row.empty()) fail(ErrorCode::EmptyRow, "layer_entropy needs at least one neighbor");
  for (const auto& rec : row) {
    if (rec.label >= num_classes) {
      fail(ErrorCode::LabelOutOfRange, "neighbor label " + std::to_string(rec.label) +
                                           " not in 0.." + std::to_string(num_classes - 1));
    }
  }
  const auto groups = group_labels(row);
  if (groups.size() == 1) return 0.0;

  // Summing over sorted counts makes the result exactly invariant to any
  // relabeling of classes.
  std::vector<std::size_t> counts;
  counts.reserve(groups.size());
  for (const auto& g : groups) counts.push_back(g.count);
  std::sort(counts.begin(), counts.end());

  const double k = static_cast<double>(row.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / k;
    h -= p * std::log(p);
  }
  return std::clamp(h, 0.0, std::log(static_cast<double>(num_classes)));
}

UqFeatureVector build_features(const PredictionBehaviorTable& pbat, const QueryMeta& meta,
                               std::size_t num_classes) {
  if (!(meta.softmax_confidence >= 0.0 && meta.softmax_confidence <= 1.0)) {
    fail(ErrorCode::NonFiniteValue, "softmax confidence of query " +
                                        std::to_string(pbat.query_id) + " is outside [0,1]");
  }
  UqFeatureVector f;
  f.query_id = pbat.query_id;
  f.softmax_confidence = meta.softmax_confidence;
  const auto seq = dominant_classes(pbat);
  f.dc = decision_change_vector(seq.modes);
  f.lu.reserve(pbat.rows.size());
  for (const auto& row : pbat.rows) f.lu.push_back(layer_entropy(row, num_classes));
  if (meta.predicted_label && meta.true_label) {
    f.correct = *meta.predicted_label == *meta.true_label;
  }
  return f;
}

QueryMeta query_meta(const ActivationTrace& trace) {
  QueryMeta meta;
  meta.softmax_confidence = trace.softmax_confidence.value_or(0.0f);
  meta.predicted_label = trace.predicted_label;
  meta.true_label = trace.true_label;
  return meta;
}

}  // namespace lwuq
