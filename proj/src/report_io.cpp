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

#include "lwuq/report_io.hpp"

#include <charconv>
#include <cstdio>
#include <ostream>

#include "lwuq/error.hpp"

namespace lwuq {

namespace {

constexpr const char* kAuprConvention =
    "average precision over descending-score tie groups";
constexpr const char* kEntropyConvention = "natural log (nats)";
constexpr const char* kDcConvention = "L-1 indicators, one per consecutive layer pair";

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

nlohmann::json k_used(const std::optional<FeatureSubsetSpec>& subset, std::size_t k_dc,
                      std::size_t k_lu) {
  nlohmann::json j = {{"dc", nullptr}, {"lu", nullptr}};
  if (subset && subset->use_dc) j["dc"] = k_dc;
  if (subset && subset->use_lu) j["lu"] = k_lu;
  return j;
}

std::string table_row(const std::string& label, double auroc, double pos, double neg) {
  return pad(label, 10, true) + pad(percent(auroc), 8) + pad(percent(pos), 8) +
         pad(percent(neg), 8) + "\n";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_features_csv(std::ostream& out, std::span<const UqFeatureVector> features) {
  const std::size_t layers = features.empty() ? 0 : features.front().lu.size();
  out << "query_id,correct,sm";
  for (std::size_t t = 1; t < layers; ++t) out << ",dc_" << t;
  for (std::size_t l = 0; l < layers; ++l) out << ",lu_" << l;
  out << '\n';
  for (const auto& f : features) {
    if (f.lu.size() != layers || f.dc.size() + 1 != layers) {
      fail(ErrorCode::DimensionMismatch, "feature rows disagree on layer count");
    }
    out << f.query_id << ',';
    if (f.correct) out << (*f.correct ? '1' : '0');
    out << ',' << format_double(f.softmax_confidence);
    for (auto bit : f.dc) out << ',' << static_cast<int>(bit);
    for (double h : f.lu) out << ',' << format_double(h);
    out << '\n';
  }
}

void write_pbat_jsonl(std::ostream& out, std::span<const PredictionBehaviorTable> pbats,
                      DistanceKind distance) {
  for (const auto& pbat : pbats) {
    const auto seq = dominant_classes(pbat);
    const auto dc = decision_change_vector(seq.modes);
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& row : pbat.rows) {
      nlohmann::json records = nlohmann::json::array();
      for (const auto& rec : row) {
        records.push_back({{"id", rec.sample_id}, {"label", rec.label}, {"distance", rec.distance}});
      }
      layers.push_back(std::move(records));
    }
    nlohmann::json j;
    j["query_id"] = pbat.query_id;
    j["k"] = pbat.k;
    j["distance"] = std::string(distance_name(distance));
    j["modes"] = seq.modes;
    j["mode_ties"] = seq.tie_flags;
    j["decision_changes"] = static_cast<std::size_t>(std::count(dc.begin(), dc.end(), 1));
    j["layers"] = std::move(layers);
    if (distance == DistanceKind::Cosine) j["zero_norm_pairs"] = pbat.zero_norm_pairs;
    out << j.dump() << '\n';
  }
}

nlohmann::json to_json(const CurveReport& r) {
  return {{"auroc", r.auroc},
          {"aupr_pos", r.aupr_pos},
          {"aupr_neg", r.aupr_neg},
          {"baselines",
           {{"auroc", r.baselines.auroc},
            {"aupr_pos", r.baselines.aupr_pos},
            {"aupr_neg", r.baselines.aupr_neg}}},
          {"n_pos", r.n_pos},
          {"n_neg", r.n_neg}};
}

nlohmann::json to_json(const SplitIndices& splits, std::span<const ActivationTrace> queries) {
  auto ids = [&](const std::vector<std::size_t>& idx) {
    std::vector<SampleId> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(queries[i].sample_id);
    return out;
  };
  return {{"train", splits.train},
          {"validation", splits.validation},
          {"test", splits.test},
          {"train_ids", ids(splits.train)},
          {"validation_ids", ids(splits.validation)},
          {"test_ids", ids(splits.test)}};
}

nlohmann::json to_json(const SweepResult& sweep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : sweep.rows) {
    nlohmann::json j = to_json(row.report);
    j["measure"] = std::string(measure_name(row.measure));
    j["k"] = row.k;
    rows.push_back(std::move(j));
  }
  return {{"config", to_json(sweep.config)},
          {"evaluated_on", "validation"},
          {"fitted_on", "train"},
          {"split_sizes",
           {{"train", sweep.splits.train.size()},
            {"validation", sweep.splits.validation.size()},
            {"test", sweep.splits.test.size()}}},
          {"rows", std::move(rows)},
          {"best_k", {{"DC", sweep.best_k_dc}, {"LU", sweep.best_k_lu}}},
          {"conventions",
           {{"aupr", kAuprConvention}, {"entropy", kEntropyConvention}, {"dc", kDcConvention}}}};
}

nlohmann::json to_json(const FinalReport& f) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : f.models) {
    nlohmann::json j = to_json(m.report);
    j["name"] = m.name;
    j["k_used"] = k_used(m.subset, f.k_dc, f.k_lu);
    j["distance"] = std::string(distance_name(f.config.distance));
    j["seed"] = f.config.seed;
    j["columns"] = m.columns;
    if (m.model) j["model"] = to_json(*m.model);
    models.push_back(std::move(j));
  }
  return {{"config", to_json(f.config)},
          {"k_dc", f.k_dc},
          {"k_lu", f.k_lu},
          {"evaluated_on", "test"},
          {"fitted_on", "train+validation"},
          {"split_sizes",
           {{"train", f.splits.train.size()},
            {"validation", f.splits.validation.size()},
            {"test", f.splits.test.size()}}},
          {"models", std::move(models)},
          {"conventions",
           {{"aupr", kAuprConvention}, {"entropy", kEntropyConvention}, {"dc", kDcConvention}}}};
}

std::string format_sweep_table(const SweepResult& sweep) {
  return format_sweep_table(to_json(sweep));
}

std::string format_final_table(const FinalReport& final_report) {
  return format_final_table(to_json(final_report));
}

std::string format_sweep_table(const nlohmann::json& sweep) {
  std::string out = pad("Measure", 10, true) + pad("k", 4) + pad("AUROC", 8) + pad("AUPR+", 8) +
                    pad("AUPR-", 8) + "\n";
  for (const auto& row : sweep.at("rows")) {
    const auto measure = row.at("measure").get<std::string>();
    const auto k = row.at("k").get<std::size_t>();
    const bool best = sweep.at("best_k").at(measure).get<std::size_t>() == k;
    out += pad(measure, 10, true) + pad(std::to_string(k), 4) +
           pad(percent(row.at("auroc").get<double>()), 8) +
           pad(percent(row.at("aupr_pos").get<double>()), 8) +
           pad(percent(row.at("aupr_neg").get<double>()), 8) + (best ? "  *" : "") + "\n";
  }
  out += "* selected by validation " + sweep.at("config").at("selection_metric").get<std::string>() +
         "\n";
  return out;
}

std::string format_final_table(const nlohmann::json& final_report) {
  std::string out =
      pad("Algorithm", 10, true) + pad("AUROC", 8) + pad("AUPR+", 8) + pad("AUPR-", 8) + "\n";
  for (const auto& m : final_report.at("models")) {
    out += table_row(m.at("name").get<std::string>(), m.at("auroc").get<double>(),
                     m.at("aupr_pos").get<double>(), m.at("aupr_neg").get<double>());
  }
  out += "k=" + std::to_string(final_report.at("k_dc").get<std::size_t>()) + " for DC, k=" +
         std::to_string(final_report.at("k_lu").get<std::size_t>()) + " for LU\n";
  return out;
}

void write_roc_csv(std::ostream& out, std::span<const RocPoint> curve) {
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve) {
    out << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
        << format_double(p.tpr) << '\n';
  }
}

void write_pr_csv(std::ostream& out, std::span<const PrPoint> curve) {
  out << "threshold,recall,precision\n";
  for (const auto& p : curve) {
    out << format_double(p.threshold) << ',' << format_double(p.recall) << ','
        << format_double(p.precision) << '\n';
  }
}

}  // namespace lwuq
