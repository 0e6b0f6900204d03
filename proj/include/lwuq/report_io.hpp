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

// Serialized outputs: feature CSV, PBAT JSON lines, sweep/final report JSON,
// curve CSVs and the plain-text tables printed by the CLI. Every writer is
// deterministic: same inputs, same bytes.

#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "lwuq/evaluation.hpp"
#include "lwuq/experiment.hpp"
#include "lwuq/tar_index.hpp"
#include "lwuq/uq_metrics.hpp"

namespace lwuq {

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Header: query_id,correct,sm,dc_1..dc_{L-1},lu_0..lu_{L-1}. `correct` is
/// 1, 0 or empty when unknown.
void write_features_csv(std::ostream& out, std::span<const UqFeatureVector> features);

/// One object per line:
///   {"query_id":..,"k":..,"distance":..,"modes":[..],"decision_changes":n,
///    "layers":[[{"id":..,"label":..,"distance":..},..],..]}
/// plus "zero_norm_pairs" for cosine scoring.
void write_pbat_jsonl(std::ostream& out, std::span<const PredictionBehaviorTable> pbats,
                      DistanceKind distance);

nlohmann::json to_json(const CurveReport& report);
nlohmann::json to_json(const SplitIndices& splits, std::span<const ActivationTrace> queries);
nlohmann::json to_json(const SweepResult& sweep);
nlohmann::json to_json(const FinalReport& final_report);

/// rows: measure, k, AUROC, AUPR+, AUPR- as percentages with two decimals.
std::string format_sweep_table(const SweepResult& sweep);
/// rows: None, SM, DC, LU, DC+LU, SM+DC+LU.
std::string format_final_table(const FinalReport& final_report);
/// Same tables rebuilt from the JSON written by to_json.
std::string format_sweep_table(const nlohmann::json& sweep);
std::string format_final_table(const nlohmann::json& final_report);

void write_roc_csv(std::ostream& out, std::span<const RocPoint> curve);
void write_pr_csv(std::ostream& out, std::span<const PrPoint> curve);

}  // namespace lwuq
