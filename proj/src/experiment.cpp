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

#include "lwuq/experiment.hpp"

#include <algorithm>
#include <cctype>

#include "lwuq/error.hpp"
#include "lwuq/parallel.hpp"

namespace lwuq {

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("field '") + name + "': " + e.what());
  }
}

std::vector<std::size_t> normalized_ks(std::span<const std::size_t> ks) {
  if (ks.empty()) fail(ErrorCode::InvalidConfig, "k_values must not be empty");
  std::vector<std::size_t> out(ks.begin(), ks.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.front() == 0) fail(ErrorCode::InvalidConfig, "k values must be positive");
  return out;
}

template <typename T>
std::vector<T> pick(const std::vector<T>& all, std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(all[i]);
  return out;
}

std::vector<std::uint8_t> targets_of(std::span<const UqFeatureVector> features) {
  std::vector<std::uint8_t> y;
  y.reserve(features.size());
  for (const auto& f : features) {
    if (!f.correct) {
      fail(ErrorCode::MissingPredictionFields,
           "query " + std::to_string(f.query_id) + " has no correctness label");
    }
    y.push_back(*f.correct ? 1 : 0);
  }
  return y;
}

std::vector<ScoredSample> scored(std::span<const double> scores, std::span<const std::uint8_t> y) {
  std::vector<ScoredSample> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = {scores[i], y[i] != 0};
  return out;
}

double selection_value(const CurveReport& r, SelectionMetric metric) {
  switch (metric) {
    case SelectionMetric::Auroc: return r.auroc;
    case SelectionMetric::AuprPos: return r.aupr_pos;
    case SelectionMetric::AuprNeg: return r.aupr_neg;
  }
  return r.auroc;
}

// The two fitting/evaluation index sets, in that order, after a sanity check
// that they are disjoint.
void check_disjoint(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::vector<std::size_t> x(a.begin(), a.end()), z(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(z.begin(), z.end());
  std::vector<std::size_t> common;
  std::set_intersection(x.begin(), x.end(), z.begin(), z.end(), std::back_inserter(common));
  if (!common.empty()) fail(ErrorCode::InvalidConfig, "fitting and evaluation rows overlap");
}

SplitIndices make_splits(std::size_t n, const SweepConfig& config) {
  return split_dataset(n, config.fractions, config.seed);
}

}  // namespace

SelectionMetric parse_selection_metric(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "auroc") return SelectionMetric::Auroc;
  if (lower == "aupr_pos" || lower == "aupr+") return SelectionMetric::AuprPos;
  if (lower == "aupr_neg" || lower == "aupr-") return SelectionMetric::AuprNeg;
  fail(ErrorCode::InvalidConfig,
       "unknown selection metric '" + std::string(text) + "' (expected auroc, aupr_pos, aupr_neg)");
}

std::string_view selection_metric_name(SelectionMetric metric) noexcept {
  switch (metric) {
    case SelectionMetric::Auroc: return "auroc";
    case SelectionMetric::AuprPos: return "aupr_pos";
    case SelectionMetric::AuprNeg: return "aupr_neg";
  }
  return "auroc";
}

std::string_view measure_name(Measure m) noexcept { return m == Measure::DC ? "DC" : "LU"; }

nlohmann::json to_json(const SweepConfig& c) {
  return {{"k_values", c.k_values},
          {"distance", std::string(distance_name(c.distance))},
          {"seed", c.seed},
          {"selection_metric", std::string(selection_metric_name(c.selection_metric))},
          {"l2", c.fit.l2},
          {"max_iters", c.fit.max_iters},
          {"tolerance", c.fit.tolerance},
          {"test_fraction", c.fractions.test},
          {"validation_fraction", c.fractions.val_of_train},
          {"exclude_self", c.exclude_self}};
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, "config must be a JSON object");
  SweepConfig c;
  c.k_values = field(j, "k_values", c.k_values);
  if (j.contains("distance")) {
    c.distance = parse_distance_kind(field<std::string>(j, "distance", ""));
  }
  c.seed = field(j, "seed", c.seed);
  if (j.contains("selection_metric")) {
    c.selection_metric = parse_selection_metric(field<std::string>(j, "selection_metric", ""));
  }
  c.fit.l2 = field(j, "l2", c.fit.l2);
  c.fit.max_iters = field(j, "max_iters", c.fit.max_iters);
  c.fit.tolerance = field(j, "tolerance", c.fit.tolerance);
  c.fractions.test = field(j, "test_fraction", c.fractions.test);
  c.fractions.val_of_train = field(j, "validation_fraction", c.fractions.val_of_train);
  c.exclude_self = field(j, "exclude_self", c.exclude_self);
  static const char* const kKnown[] = {"k_values",  "distance",      "seed",
                                       "selection_metric", "l2",     "max_iters",
                                       "tolerance", "test_fraction", "validation_fraction",
                                       "exclude_self", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      fail(ErrorCode::InvalidConfig, "unknown field '" + key + "'");
    }
  }
  normalized_ks(c.k_values);
  return c;
}

const std::vector<UqFeatureVector>& FeatureBank::at(std::size_t k) const {
  const auto it = by_k.find(k);
  if (it == by_k.end()) fail(ErrorCode::InvalidConfig, "no features computed for k=" + std::to_string(k));
  return it->second;
}

FeatureBank compute_feature_bank(const TrainingActivationRepository& tar,
                                 std::span<const ActivationTrace> queries,
                                 std::span<const std::size_t> k_values, DistanceKind distance,
                                 std::size_t threads, bool exclude_self) {
  const auto ks = normalized_ks(k_values);
  FeatureBank bank;
  bank.distance = distance;
  ScoringOptions options;
  options.threads = threads;
  options.exclude_self = exclude_self;
  bank.pbats = score_queries(tar, queries, ks.back(), distance, options);
  for (std::size_t k : ks) {
    std::vector<UqFeatureVector> features(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) {
      const auto table = k == ks.back() ? bank.pbats[i] : truncate_pbat(bank.pbats[i], k);
      features[i] = build_features(table, query_meta(queries[i]), tar.num_classes());
    });
    bank.by_k.emplace(k, std::move(features));
  }
  return bank;
}

SweepResult run_sweep(const TrainingActivationRepository& tar,
                      std::span<const ActivationTrace> queries, const SweepConfig& config) {
  const auto bank = compute_feature_bank(tar, queries, config.k_values, config.distance,
                                         config.threads, config.exclude_self);
  return run_sweep(bank, queries, config);
}

SweepResult run_sweep(const FeatureBank& bank, std::span<const ActivationTrace> queries,
                      const SweepConfig& config) {
  SweepResult result;
  result.config = config;
  result.config.k_values = normalized_ks(config.k_values);
  result.splits = make_splits(queries.size(), config);
  const auto& split = result.splits;
  check_disjoint(split.train, split.validation);

  for (Measure measure : {Measure::DC, Measure::LU}) {
    FeatureSubsetSpec subset;
    subset.use_dc = measure == Measure::DC;
    subset.use_lu = measure == Measure::LU;
    const SweepRow* best = nullptr;
    for (std::size_t k : result.config.k_values) {
      const auto& features = bank.at(k);
      const auto train = pick(features, split.train);
      const auto val = pick(features, split.validation);
      const auto y_train = targets_of(train);
      const auto y_val = targets_of(val);
      const auto model = fit(design_matrix(train, train, subset), y_train, subset, config.fit);
      const auto scores = predict_scores(model, design_matrix(val, val, subset));
      const auto samples = scored(scores, y_val);
      result.rows.push_back({measure, k, evaluate_scores(samples)});
    }
    // Ties keep the smaller k.
    for (const auto& row : result.rows) {
      if (row.measure != measure) continue;
      if (best == nullptr || selection_value(row.report, config.selection_metric) >
                                 selection_value(best->report, config.selection_metric)) {
        best = &row;
      }
    }
    (measure == Measure::DC ? result.best_k_dc : result.best_k_lu) = best->k;
  }
  return result;
}

std::vector<FeatureSubsetSpec> standard_subsets() {
  return {{true, false, false}, {false, true, false}, {false, false, true},
          {false, true, true},  {true, true, true}};
}

FinalReport run_final(const TrainingActivationRepository& tar,
                      std::span<const ActivationTrace> queries, std::size_t k_dc,
                      std::size_t k_lu, const SweepConfig& config) {
  const std::vector<std::size_t> ks{k_dc, k_lu};
  const auto bank = compute_feature_bank(tar, queries, ks, config.distance, config.threads,
                                         config.exclude_self);
  return run_final(bank, queries, k_dc, k_lu, config);
}

FinalReport run_final(const FeatureBank& bank, std::span<const ActivationTrace> queries,
                      std::size_t k_dc, std::size_t k_lu, const SweepConfig& config,
                      bool with_curves) {
  FinalReport out;
  out.config = config;
  out.k_dc = k_dc;
  out.k_lu = k_lu;
  out.splits = make_splits(queries.size(), config);

  std::vector<std::size_t> fit_rows = out.splits.train;
  fit_rows.insert(fit_rows.end(), out.splits.validation.begin(), out.splits.validation.end());
  std::sort(fit_rows.begin(), fit_rows.end());
  check_disjoint(fit_rows, out.splits.test);

  const auto dc_fit = pick(bank.at(k_dc), fit_rows);
  const auto lu_fit = pick(bank.at(k_lu), fit_rows);
  const auto dc_test = pick(bank.at(k_dc), out.splits.test);
  const auto lu_test = pick(bank.at(k_lu), out.splits.test);
  const auto y_fit = targets_of(lu_fit);
  const auto y_test = targets_of(lu_test);

  {
    ModelReport none;
    none.name = "None";
    const auto samples = scored(std::vector<double>(y_test.size(), 0.5), y_test);
    none.report.n_pos = static_cast<std::size_t>(std::count(y_test.begin(), y_test.end(), 1));
    none.report.n_neg = y_test.size() - none.report.n_pos;
    none.report.baselines = baselines_of(samples);
    none.report.auroc = none.report.baselines.auroc;
    none.report.aupr_pos = none.report.baselines.aupr_pos;
    none.report.aupr_neg = none.report.baselines.aupr_neg;
    out.models.push_back(std::move(none));
  }

  const std::size_t layers = lu_fit.empty() ? 0 : lu_fit.front().lu.size();
  for (const auto& subset : standard_subsets()) {
    ModelReport m;
    m.name = subset.name();
    m.subset = subset;
    m.columns = column_names(subset, layers);
    const auto model = fit(design_matrix(dc_fit, lu_fit, subset), y_fit, subset, config.fit);
    const auto scores = predict_scores(model, design_matrix(dc_test, lu_test, subset));
    m.report = evaluate_scores(scored(scores, y_test), with_curves);
    m.model = model;
    out.models.push_back(std::move(m));
  }
  return out;
}

}  // namespace lwuq
