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

#include "lwuq/tar_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "lwuq/error.hpp"
#include "lwuq/parallel.hpp"
#include "lwuq/tard_format.hpp"

namespace lwuq {

namespace {

constexpr std::size_t kScanBlock = 256;

// Orders candidates by (distance, sample_id); the heap keeps the worst on top.
struct Candidate {
  double distance;
  SampleId sample_id;
  std::size_t row;

  bool operator<(const Candidate& other) const {
    if (distance != other.distance) return distance < other.distance;
    return sample_id < other.sample_id;
  }
};

// Header used to validate query traces: same layers and classes, without
// the queryset-only field requirements.
DatasetHeader query_header(const TrainingActivationRepository& tar) {
  DatasetHeader h = tar.header();
  h.kind = DatasetKind::Repository;
  return h;
}

void check_unique_ids(std::span<const SampleId> ids) {
  std::unordered_set<SampleId> seen;
  seen.reserve(ids.size());
  for (SampleId id : ids) {
    if (!seen.insert(id).second) {
      fail(ErrorCode::DuplicateSampleId,
           "sample_id " + std::to_string(id) + " appears more than once");
    }
  }
}

}  // namespace

bool TrainingActivationRepository::operator==(const TrainingActivationRepository& other) const {
  if (!(header_ == other.header_) || labels_ != other.labels_ ||
      sample_ids_ != other.sample_ids_ || layers_.size() != other.layers_.size()) {
    return false;
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& a = layers_[l];
    const auto& b = other.layers_[l];
    if (a.size() != b.size() ||
        (!a.empty() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) != 0)) {
      return false;
    }
  }
  return true;
}

TrainingActivationRepository build_tar(std::span<const ActivationTrace> traces,
                                       const DatasetHeader& header) {
  if (traces.empty()) fail(ErrorCode::EmptyRepository, "no training traces supplied");
  if (header.kind != DatasetKind::Repository) {
    fail(ErrorCode::KindMismatch, std::string("expected a repository, got a ") +
                                      kind_name(header.kind));
  }
  DatasetHeader h = header;
  h.num_samples = traces.size();
  h.validate();

  TrainingActivationRepository tar;
  tar.header_ = h;
  tar.labels_.reserve(traces.size());
  tar.sample_ids_.reserve(traces.size());
  for (const auto& trace : traces) {
    validate_trace(trace, h);
    tar.labels_.push_back(trace.true_label);
    tar.sample_ids_.push_back(trace.sample_id);
  }
  check_unique_ids(tar.sample_ids_);

  tar.layers_.resize(h.num_layers);
  for (std::size_t l = 0; l < h.num_layers; ++l) {
    auto& matrix = tar.layers_[l];
    matrix.reserve(traces.size() * h.dim(l));
    for (const auto& trace : traces) {
      matrix.insert(matrix.end(), trace.activations[l].begin(), trace.activations[l].end());
    }
  }
  return tar;
}

void save_tar(const TrainingActivationRepository& tar, const std::filesystem::path& path) {
  tard::Contents contents;
  contents.header = tar.header_;
  contents.records.reserve(tar.size());
  for (std::size_t i = 0; i < tar.size(); ++i) {
    contents.records.push_back({tar.sample_ids_[i], tar.labels_[i], std::nullopt, std::nullopt});
  }
  contents.layers = tar.layers_;
  tard::write_bytes(path, tard::encode(contents));
}

TrainingActivationRepository load_tar(const std::filesystem::path& path) {
  tard::Contents contents = tard::decode(tard::read_bytes(path));
  if (contents.header.kind != DatasetKind::Repository) {
    fail(ErrorCode::KindMismatch, "'" + path.string() + "' is a queryset, not a repository");
  }
  TrainingActivationRepository tar;
  tar.header_ = contents.header;
  tar.labels_.reserve(contents.records.size());
  tar.sample_ids_.reserve(contents.records.size());
  for (const auto& rec : contents.records) {
    if (rec.true_label >= tar.header_.num_classes) {
      fail(ErrorCode::LabelOutOfRange, "sample_id " + std::to_string(rec.sample_id) +
                                           " true_label " + std::to_string(rec.true_label) +
                                           " not in 0.." +
                                           std::to_string(tar.header_.num_classes - 1));
    }
    tar.labels_.push_back(rec.true_label);
    tar.sample_ids_.push_back(rec.sample_id);
  }
  check_unique_ids(tar.sample_ids_);
  for (std::size_t l = 0; l < contents.layers.size(); ++l) {
    const auto& matrix = contents.layers[l];
    const std::size_t dim = tar.header_.dim(l);
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      if (!std::isfinite(matrix[j])) {
        fail(ErrorCode::NonFiniteValue, "sample_id " +
                                            std::to_string(tar.sample_ids_[j / dim]) + " layer " +
                                            std::to_string(l) + " has a non-finite value");
      }
    }
  }
  tar.layers_ = std::move(contents.layers);
  return tar;
}

std::vector<NeighborRecord> query_layer(const TrainingActivationRepository& tar,
                                        std::size_t layer, std::span<const float> query,
                                        std::size_t k, DistanceKind metric,
                                        const QueryOptions& options,
                                        std::size_t* zero_norm_pairs) {
  if (layer >= tar.num_layers()) {
    fail(ErrorCode::LayerOutOfRange, "layer " + std::to_string(layer) + " not in 0.." +
                                         std::to_string(tar.num_layers() - 1));
  }
  const std::size_t dim = tar.dim(layer);
  if (query.size() != dim) {
    fail(ErrorCode::DimensionMismatch, "query has " + std::to_string(query.size()) +
                                           " entries, layer " + std::to_string(layer) +
                                           " has dim " + std::to_string(dim));
  }
  const auto ids = tar.sample_ids();
  std::size_t available = tar.size();
  if (options.exclude_id && std::find(ids.begin(), ids.end(), *options.exclude_id) != ids.end()) {
    --available;
  }
  if (k == 0 || k > available) {
    fail(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " is not admissible; k must be ≤ " +
                                   std::to_string(available) + " and ≥ 1");
  }

  const bool query_zero = metric == DistanceKind::Cosine && is_zero_norm(query);
  std::size_t zero_pairs = 0;

  std::vector<Candidate> heap;
  heap.reserve(k + 1);
  std::vector<double> block(kScanBlock);
  const auto matrix = tar.layer_matrix(layer);
  for (std::size_t start = 0; start < tar.size(); start += kScanBlock) {
    const std::size_t end = std::min(start + kScanBlock, tar.size());
    for (std::size_t i = start; i < end; ++i) {
      const auto row = matrix.subspan(i * dim, dim);
      block[i - start] = distance(metric, query, row);
      if (metric == DistanceKind::Cosine && (query_zero || is_zero_norm(row))) ++zero_pairs;
    }
    for (std::size_t i = start; i < end; ++i) {
      if (options.exclude_id && ids[i] == *options.exclude_id) continue;
      const Candidate c{block[i - start], ids[i], i};
      if (heap.size() < k) {
        heap.push_back(c);
        std::push_heap(heap.begin(), heap.end());
      } else if (c < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = c;
        std::push_heap(heap.begin(), heap.end());
      }
    }
  }
  std::sort_heap(heap.begin(), heap.end());

  if (zero_norm_pairs != nullptr) *zero_norm_pairs = zero_pairs;
  std::vector<NeighborRecord> out;
  out.reserve(heap.size());
  const auto labels = tar.labels();
  for (const auto& c : heap) out.push_back({c.sample_id, labels[c.row], c.distance});
  return out;
}

PredictionBehaviorTable build_pbat(const TrainingActivationRepository& tar,
                                   const ActivationTrace& query, std::size_t k,
                                   DistanceKind metric, const QueryOptions& options) {
  validate_trace(query, query_header(tar));
  PredictionBehaviorTable pbat;
  pbat.query_id = query.sample_id;
  pbat.k = k;
  pbat.rows.resize(tar.num_layers());
  pbat.zero_norm_pairs.assign(tar.num_layers(), 0);
  for (std::size_t l = 0; l < tar.num_layers(); ++l) {
    pbat.rows[l] =
        query_layer(tar, l, query.activations[l], k, metric, options, &pbat.zero_norm_pairs[l]);
  }
  return pbat;
}

PredictionBehaviorTable truncate_pbat(const PredictionBehaviorTable& pbat, std::size_t k) {
  if (k == 0 || k > pbat.k) {
    fail(ErrorCode::KTooLarge, "cannot truncate a k=" + std::to_string(pbat.k) +
                                   " table to k=" + std::to_string(k));
  }
  PredictionBehaviorTable out;
  out.query_id = pbat.query_id;
  out.k = k;
  out.zero_norm_pairs = pbat.zero_norm_pairs;
  out.rows.reserve(pbat.rows.size());
  for (const auto& row : pbat.rows) {
    out.rows.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

std::vector<PredictionBehaviorTable> score_queries(const TrainingActivationRepository& tar,
                                                   std::span<const ActivationTrace> queries,
                                                   std::size_t k, DistanceKind metric,
                                                   const ScoringOptions& options) {
  std::vector<PredictionBehaviorTable> out(queries.size());
  parallel_for(queries.size(), options.threads, [&](std::size_t i) {
    QueryOptions q = options.query;
    if (options.exclude_self) q.exclude_id = queries[i].sample_id;
    out[i] = build_pbat(tar, queries[i], k, metric, q);
  });
  return out;
}

}  // namespace lwuq
