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


// Test fixtures and brute-force oracles. The oracles avoid the library's
// fast paths: they score every pair, sort everything, and count by hand.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lwuq/core_model.hpp"
#include "lwuq/distance.hpp"
#include "lwuq/error.hpp"
#include "lwuq/evaluation.hpp"
#include "lwuq/tar_index.hpp"

namespace lwuq::testing {

#define EXPECT_LWUQ_ERROR(stmt, expected_code)                          \
  do {                                                                  \
    bool caught_ = false;                                               \
    try {                                                               \
      stmt;                                                             \
    } catch (const ::lwuq::Error& e_) {                                 \
      caught_ = true;                                                   \
      EXPECT_EQ(::lwuq::error_name(e_.code()),                          \
                ::lwuq::error_name(expected_code))                      \
          << e_.what();                                                 \
    }                                                                   \
    EXPECT_TRUE(caught_) << "no lwuq::Error thrown by " #stmt;          \
  } while (0)

inline DatasetHeader make_header(std::vector<std::size_t> dims, std::size_t num_classes,
                                 std::size_t num_samples,
                                 DatasetKind kind = DatasetKind::Repository) {
  DatasetHeader h;
  h.num_layers = dims.size();
  h.num_samples = num_samples;
  h.num_classes = num_classes;
  h.layer_specs = make_layer_specs(dims);
  h.kind = kind;
  return h;
}

// Values drawn from a small grid so that exact distance ties are common.
inline std::vector<float> random_vector(std::mt19937_64& rng, std::size_t dim, bool coarse) {
  std::vector<float> v(dim);
  if (coarse) {
    std::uniform_int_distribution<int> pick(0, 3);
    for (auto& x : v) x = static_cast<float>(pick(rng));
  } else {
    std::uniform_real_distribution<float> u(0.0f, 4.0f);
    for (auto& x : v) x = u(rng);
  }
  return v;
}

inline Dataset random_dataset(std::mt19937_64& rng, std::vector<std::size_t> dims,
                              std::size_t num_classes, std::size_t n, DatasetKind kind,
                              bool coarse = false, SampleId first_id = 0) {
  Dataset ds;
  ds.header = make_header(dims, num_classes, n, kind);
  std::uniform_int_distribution<int> label(0, static_cast<int>(num_classes) - 1);
  std::uniform_real_distribution<float> conf(0.0f, 1.0f);
  for (std::size_t i = 0; i < n; ++i) {
    ActivationTrace t;
    t.sample_id = first_id + static_cast<SampleId>(i);
    t.true_label = static_cast<ClassId>(label(rng));
    for (std::size_t d : dims) t.activations.push_back(random_vector(rng, d, coarse));
    if (kind == DatasetKind::QuerySet) {
      t.predicted_label = static_cast<ClassId>(label(rng));
      t.softmax_confidence = conf(rng);
    }
    ds.traces.push_back(std::move(t));
  }
  return ds;
}

// Naive k-NN: distance to every row, full sort by (distance, sample_id).
inline std::vector<NeighborRecord> knn_oracle(const TrainingActivationRepository& tar,
                                              std::size_t layer, const std::vector<float>& q,
                                              std::size_t k, DistanceKind metric) {
  std::vector<NeighborRecord> all;
  for (std::size_t i = 0; i < tar.size(); ++i) {
    all.push_back({tar.sample_ids()[i], tar.labels()[i], distance(metric, q, tar.row(layer, i))});
  }
  std::sort(all.begin(), all.end(), [](const NeighborRecord& a, const NeighborRecord& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.sample_id < b.sample_id;
  });
  all.resize(k);
  return all;
}

// -sum p log p with counts kept in a map, summed in map order.
inline double entropy_oracle(const std::vector<int>& labels) {
  std::map<int, int> counts;
  for (int l : labels) ++counts[l];
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(labels.size());
    h -= p * std::log(p);
  }
  return h;
}

inline std::vector<NeighborRecord> row_of(const std::vector<int>& labels) {
  std::vector<NeighborRecord> row;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    row.push_back({static_cast<SampleId>(i), static_cast<ClassId>(labels[i]), 0.1 * static_cast<double>(i)});
  }
  return row;
}

// Every (correct, incorrect) pair: win 1, tie 1/2.
inline double pairwise_auroc(const std::vector<ScoredSample>& s) {
  double wins = 0.0;
  double pairs = 0.0;
  for (const auto& p : s) {
    if (!p.correct) continue;
    for (const auto& n : s) {
      if (n.correct) continue;
      pairs += 1.0;
      if (p.score > n.score) wins += 1.0;
      else if (p.score == n.score) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Average precision from a threshold walk over distinct scores, descending.
inline double ap_oracle(const std::vector<ScoredSample>& s, bool positive_is_correct) {
  std::vector<double> thresholds;
  double total_pos = 0.0;
  for (const auto& x : s) {
    thresholds.push_back(positive_is_correct ? x.score : -x.score);
    if (x.correct == positive_is_correct) total_pos += 1.0;
  }
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double ap = 0.0;
  double prev_recall = 0.0;
  for (double t : thresholds) {
    double tp = 0.0, predicted = 0.0;
    for (const auto& x : s) {
      const double score = positive_is_correct ? x.score : -x.score;
      if (score >= t) {
        predicted += 1.0;
        if (x.correct == positive_is_correct) tp += 1.0;
      }
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / predicted);
    prev_recall = recall;
  }
  return ap;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("lwuq_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace lwuq::testing
