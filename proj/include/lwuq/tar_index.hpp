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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "lwuq/core_model.hpp"
#include "lwuq/distance.hpp"

namespace lwuq {

/// Training Activation Repository: every training sample's activations,
/// stored layer-major so that a single-layer scan reads contiguous memory.
/// Immutable once built; concurrent queries need no locking.
class TrainingActivationRepository {
 public:
  TrainingActivationRepository() = default;

  const DatasetHeader& header() const { return header_; }
  std::size_t size() const { return sample_ids_.size(); }
  std::size_t num_layers() const { return header_.num_layers; }
  std::size_t num_classes() const { return header_.num_classes; }
  std::size_t dim(std::size_t layer) const { return header_.dim(layer); }

  /// N x dim(layer) row-major matrix.
  std::span<const float> layer_matrix(std::size_t layer) const { return layers_[layer]; }
  std::span<const float> row(std::size_t layer, std::size_t index) const {
    const std::size_t d = dim(layer);
    return std::span<const float>(layers_[layer]).subspan(index * d, d);
  }
  std::span<const ClassId> labels() const { return labels_; }
  std::span<const SampleId> sample_ids() const { return sample_ids_; }

  /// Bit-exact equality of header, ids, labels and matrices.
  bool operator==(const TrainingActivationRepository& other) const;

 private:
  friend TrainingActivationRepository build_tar(std::span<const ActivationTrace>,
                                                const DatasetHeader&);
  friend TrainingActivationRepository load_tar(const std::filesystem::path&);
  friend void save_tar(const TrainingActivationRepository&, const std::filesystem::path&);

  DatasetHeader header_;
  std::vector<std::vector<float>> layers_;
  std::vector<ClassId> labels_;
  std::vector<SampleId> sample_ids_;
};

struct NeighborRecord {
  SampleId sample_id = 0;
  ClassId label = 0;
  double distance = 0.0;

  bool operator==(const NeighborRecord&) const = default;
};

/// Prediction Behavior Analysis Table: for each layer, the k nearest training
/// samples in ascending (distance, sample_id) order.
struct PredictionBehaviorTable {
  SampleId query_id = 0;
  std::size_t k = 0;
  std::vector<std::vector<NeighborRecord>> rows;
  /// Per layer, the number of scanned pairs where the cosine kernel hit a
  /// zero-norm vector and returned its neutral value. Always zero for the
  /// other kernels.
  std::vector<std::size_t> zero_norm_pairs;

  std::size_t num_layers() const { return rows.size(); }
};

struct QueryOptions {
  /// Skips this training sample; used for self-query experiments.
  std::optional<SampleId> exclude_id;
};

/// Builds a repository from validated traces, preserving insertion order.
/// Throws EmptyRepository, KindMismatch, DuplicateSampleId or any
/// validate_trace error.
TrainingActivationRepository build_tar(std::span<const ActivationTrace> traces,
                                       const DatasetHeader& header);

/// Persists as a TARD file of kind repository.
void save_tar(const TrainingActivationRepository& tar, const std::filesystem::path& path);

/// Loads and re-validates a TARD repository file. Throws the file format
/// errors, KindMismatch for a queryset file, and validation errors.
TrainingActivationRepository load_tar(const std::filesystem::path& path);

/// Exact k nearest rows of one layer by a full scan, ascending by distance
/// with ties broken by smaller sample_id.
/// Throws KTooLarge, DimensionMismatch, LayerOutOfRange.
std::vector<NeighborRecord> query_layer(const TrainingActivationRepository& tar,
                                        std::size_t layer, std::span<const float> query,
                                        std::size_t k, DistanceKind metric,
                                        const QueryOptions& options = {},
                                        std::size_t* zero_norm_pairs = nullptr);

/// One query_layer call per layer of a validated query trace.
PredictionBehaviorTable build_pbat(const TrainingActivationRepository& tar,
                                   const ActivationTrace& query, std::size_t k,
                                   DistanceKind metric, const QueryOptions& options = {});

/// Keeps the first k records of every row. Since rows follow a total order,
/// the result equals a fresh build_pbat with the smaller k.
PredictionBehaviorTable truncate_pbat(const PredictionBehaviorTable& pbat, std::size_t k);

struct ScoringOptions {
  QueryOptions query;
  /// Excludes each query's own sample_id from its neighbors.
  bool exclude_self = false;
  std::size_t threads = 1;
};

/// build_pbat over many queries, parallel across queries. The output is in
/// input order and identical for any thread count.
std::vector<PredictionBehaviorTable> score_queries(const TrainingActivationRepository& tar,
                                                   std::span<const ActivationTrace> queries,
                                                   std::size_t k, DistanceKind metric,
                                                   const ScoringOptions& options = {});

}  // namespace lwuq
