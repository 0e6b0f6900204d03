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

// The evaluation protocol: split the scored query set into meta-train,
// validation and test parts, pick k per measure on validation, then compare
// the combiners on test.
//
// Split discipline: sweep models fit on `train` and are scored on
// `validation`; final models fit on `train` + `validation` and are scored on
// `test`.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "lwuq/evaluation.hpp"
#include "lwuq/meta_classifier.hpp"
#include "lwuq/tar_index.hpp"
#include "lwuq/uq_metrics.hpp"

namespace lwuq {

enum class SelectionMetric { Auroc, AuprPos, AuprNeg };

SelectionMetric parse_selection_metric(std::string_view text);
std::string_view selection_metric_name(SelectionMetric metric) noexcept;

struct SweepConfig {
  std::vector<std::size_t> k_values{3, 5, 10, 20};
  DistanceKind distance = DistanceKind::BrayCurtis;
  std::uint64_t seed = 0;
  SelectionMetric selection_metric = SelectionMetric::Auroc;
  FitOptions fit;
  SplitFractions fractions;
  std::size_t threads = 1;
  bool exclude_self = false;
};

nlohmann::json to_json(const SweepConfig& config);
/// Missing fields keep their defaults. Throws InvalidConfig naming the field.
SweepConfig sweep_config_from_json(const nlohmann::json& j);

/// Feature vectors of every query at each requested k. Tables are computed
/// once at the largest k and truncated for the others.
struct FeatureBank {
  DistanceKind distance = DistanceKind::BrayCurtis;
  std::vector<PredictionBehaviorTable> pbats;  // at max k, in query order
  std::map<std::size_t, std::vector<UqFeatureVector>> by_k;

  const std::vector<UqFeatureVector>& at(std::size_t k) const;
};

FeatureBank compute_feature_bank(const TrainingActivationRepository& tar,
                                 std::span<const ActivationTrace> queries,
                                 std::span<const std::size_t> k_values, DistanceKind distance,
                                 std::size_t threads, bool exclude_self = false);

enum class Measure { DC, LU };

std::string_view measure_name(Measure m) noexcept;

struct SweepRow {
  Measure measure = Measure::DC;
  std::size_t k = 0;
  CurveReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // DC rows then LU rows, k ascending
  std::size_t best_k_dc = 0;
  std::size_t best_k_lu = 0;
  SplitIndices splits;
  SweepConfig config;
};

/// Throws SingleClass when the validation split lacks either outcome,
/// SingleClassTarget when the fitting split does.
SweepResult run_sweep(const TrainingActivationRepository& tar,
                      std::span<const ActivationTrace> queries, const SweepConfig& config);
SweepResult run_sweep(const FeatureBank& bank, std::span<const ActivationTrace> queries,
                      const SweepConfig& config);

struct ModelReport {
  std::string name;  // None, SM, DC, LU, DC+LU, SM+DC+LU
  std::optional<FeatureSubsetSpec> subset;  // absent for None
  CurveReport report;
  std::optional<LogisticModel> model;
  std::vector<std::string> columns;
};

struct FinalReport {
  std::vector<ModelReport> models;
  std::size_t k_dc = 0;
  std::size_t k_lu = 0;
  SplitIndices splits;
  SweepConfig config;
};

/// The five combiners plus the None baseline, fitted on train + validation
/// and evaluated on test. DC columns use k_dc, LU columns use k_lu.
FinalReport run_final(const TrainingActivationRepository& tar,
                      std::span<const ActivationTrace> queries, std::size_t k_dc,
                      std::size_t k_lu, const SweepConfig& config);
FinalReport run_final(const FeatureBank& bank, std::span<const ActivationTrace> queries,
                      std::size_t k_dc, std::size_t k_lu, const SweepConfig& config,
                      bool with_curves = false);

/// The standard model line-up, in report order (None excluded).
std::vector<FeatureSubsetSpec> standard_subsets();

}  // namespace lwuq
