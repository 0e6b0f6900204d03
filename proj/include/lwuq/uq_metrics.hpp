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

// Decision Change and Layer Uncertainty, computed from the neighbor labels of
// a prediction behavior table.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lwuq/tar_index.hpp"

namespace lwuq {

struct DominantClass {
  ClassId label = 0;
  bool tied = false;  // the top count was shared by several labels
};

struct DominantClassSequence {
  std::vector<ClassId> modes;
  std::vector<bool> tie_flags;
};

struct UqFeatureVector {
  SampleId query_id = 0;
  std::vector<std::uint8_t> dc;  // L-1 indicators, entry t compares layers t and t+1
  std::vector<double> lu;        // L entropies in nats
  double softmax_confidence = 0.0;
  std::optional<bool> correct;

  std::size_t decision_changes() const;
};

struct QueryMeta {
  double softmax_confidence = 0.0;
  std::optional<ClassId> predicted_label;
  std::optional<ClassId> true_label;
};

/// Most frequent label in a row. Count ties go to the label whose distances
/// sum lowest, then to the smallest class id. Throws EmptyRow.
DominantClass dominant_class(std::span<const NeighborRecord> row);

DominantClassSequence dominant_classes(const PredictionBehaviorTable& pbat);

/// Entry t is 1 iff modes[t+1] != modes[t]. Empty for a single layer.
std::vector<std::uint8_t> decision_change_vector(std::span<const ClassId> modes);

/// Natural-log Shannon entropy of the row's label distribution, within
/// [0, ln C]. Throws EmptyRow, and LabelOutOfRange for labels >= C.
double layer_entropy(std::span<const NeighborRecord> row, std::size_t num_classes);

UqFeatureVector build_features(const PredictionBehaviorTable& pbat, const QueryMeta& meta,
                               std::size_t num_classes);

QueryMeta query_meta(const ActivationTrace& trace);

}  // namespace lwuq
