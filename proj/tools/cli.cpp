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

#include "cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "lwuq/error.hpp"
#include "lwuq/experiment.hpp"
#include "lwuq/parallel.hpp"
#include "lwuq/report_io.hpp"
#include "lwuq/synthetic.hpp"
#include "lwuq/tar_index.hpp"
#include "lwuq/tard_format.hpp"

namespace lwuq::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string sha256_hex(const fs::path& path) {
  const auto bytes = tard::read_bytes(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::Io, "cannot hash '" + path.string() + "'");
  }
  static const char* const kHex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  tard::write_bytes(path, bytes);
}

json read_json_file(const fs::path& path) {
  const auto bytes = tard::read_bytes(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidConfig, "'" + path.string() + "': " + e.what());
  }
}

// One manifest per run directory. Everything except the two timestamps is a
// function of the inputs.
class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed)
      : command_(std::move(command)), seed_(seed), started_(utc_now()) {}

  void add_input(const std::string& role, const fs::path& path) {
    inputs_.push_back({{"role", role}, {"path", path.string()}, {"sha256", sha256_hex(path)}});
  }
  void set_config(json config) { config_ = std::move(config); }

  void write(const fs::path& dir) const {
    const json j = {{"command", command_},
                    {"config", config_},
                    {"inputs", inputs_},
                    {"seed", seed_},
                    {"tool_version", kToolVersion},
                    {"started_at", started_},
                    {"finished_at", utc_now()}};
    write_text(dir / "manifest.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::uint64_t seed_;
  std::string started_;
  json config_ = json::object();
  json inputs_ = json::array();
};

std::size_t resolve_threads(std::size_t flag_value, bool flag_given) {
  if (flag_given) return std::max<std::size_t>(1, flag_value);
  if (const char* env = std::getenv("UQ_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    fail(ErrorCode::InvalidConfig, std::string("UQ_THREADS='") + env + "' is not a positive integer");
  }
  return default_thread_count();
}

Dataset load_queries(const fs::path& path) {
  Dataset ds = tard::read_dataset(path);
  if (ds.header.kind != DatasetKind::QuerySet) {
    fail(ErrorCode::KindMismatch, "'" + path.string() + "' is a repository, expected a queryset");
  }
  std::stable_sort(ds.traces.begin(), ds.traces.end(),
                   [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
  return ds;
}

void check_compatible(const TrainingActivationRepository& tar, const Dataset& queries) {
  const auto& a = tar.header();
  const auto& b = queries.header;
  if (a.num_classes != b.num_classes || a.num_layers != b.num_layers) {
    fail(ErrorCode::DimensionMismatch, "repository and queryset disagree on layers or classes");
  }
  for (std::size_t l = 0; l < a.num_layers; ++l) {
    if (a.dim(l) != b.dim(l)) {
      fail(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " dim differs: repository " +
                                             std::to_string(a.dim(l)) + ", queryset " +
                                             std::to_string(b.dim(l)));
    }
  }
}

// Features whose DC part comes from one k and LU part from another.
std::vector<UqFeatureVector> merge_features(const std::vector<UqFeatureVector>& dc_source,
                                            const std::vector<UqFeatureVector>& lu_source) {
  std::vector<UqFeatureVector> out = lu_source;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].dc = dc_source[i].dc;
  return out;
}

// Flags shared by sweep and evaluate.
struct ExperimentFlags {
  std::string tar_path;
  std::string queries_path;
  std::string out_dir;
  std::string config_path;
  std::vector<std::size_t> k_values;
  std::string distance;
  std::uint64_t seed = 0;
  std::string selection;
  double l2 = 0.0;
  std::size_t threads = 1;
  CLI::Option* k_opt = nullptr;
  CLI::Option* distance_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* selection_opt = nullptr;
  CLI::Option* l2_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  void attach(CLI::App* cmd, bool k_list) {
    cmd->add_option("--tar", tar_path, "Training activation repository (TARD)")->required();
    cmd->add_option("--queries", queries_path, "Query set (TARD, kind=queryset)")->required();
    cmd->add_option("--out", out_dir, "Run directory")->required();
    cmd->add_option("--config", config_path, "JSON experiment config");
    if (k_list) {
      k_opt = cmd->add_option("--k", k_values, "Neighborhood sizes, e.g. 3,5,10,20")->delimiter(',');
    }
    distance_opt = cmd->add_option("--distance", distance, "braycurtis | euclidean | cosine");
    seed_opt = cmd->add_option("--seed", seed, "Seed for the data split");
    selection_opt = cmd->add_option("--selection-metric", selection, "auroc | aupr_pos | aupr_neg");
    l2_opt = cmd->add_option("--l2", l2, "L2 penalty of the logistic combiners");
    threads_opt = cmd->add_option("--threads", threads, "Worker threads (env UQ_THREADS)");
  }

  SweepConfig resolve() const {
    SweepConfig c;
    if (!config_path.empty()) c = sweep_config_from_json(read_json_file(config_path));
    if (k_opt != nullptr && k_opt->count() > 0) c.k_values = k_values;
    if (distance_opt->count() > 0) c.distance = parse_distance_kind(distance);
    if (seed_opt->count() > 0) c.seed = seed;
    if (selection_opt->count() > 0) c.selection_metric = parse_selection_metric(selection);
    if (l2_opt->count() > 0) c.fit.l2 = l2;
    c.threads = resolve_threads(threads, threads_opt->count() > 0);
    return c;
  }
};

int cmd_build_tar(const std::string& input, const std::string& output, std::ostream& out) {
  const Dataset ds = tard::read_dataset(input);
  if (ds.header.kind != DatasetKind::Repository) {
    fail(ErrorCode::KindMismatch, "'" + input + "' is a queryset, expected a repository");
  }
  const auto tar = build_tar(ds.traces, ds.header);
  save_tar(tar, output);
  out << "N=" << tar.size() << " L=" << tar.num_layers() << " C=" << tar.num_classes() << " dims=";
  for (std::size_t l = 0; l < tar.num_layers(); ++l) out << (l ? "," : "") << tar.dim(l);
  out << "\n";
  return kExitOk;
}

struct ScoreFlags {
  std::string tar_path, queries_path, out_dir, distance = "braycurtis";
  std::size_t k = 5;
  std::size_t threads = 1;
  bool exclude_self = false;
  CLI::Option* threads_opt = nullptr;
};

int cmd_score(const ScoreFlags& f, std::ostream& out) {
  const auto metric = parse_distance_kind(f.distance);
  const auto tar = load_tar(f.tar_path);
  const Dataset queries = load_queries(f.queries_path);
  check_compatible(tar, queries);
  ScoringOptions options;
  options.threads = resolve_threads(f.threads, f.threads_opt->count() > 0);
  options.exclude_self = f.exclude_self;
  const auto pbats = score_queries(tar, queries.traces, f.k, metric, options);

  std::vector<UqFeatureVector> features(pbats.size());
  for (std::size_t i = 0; i < pbats.size(); ++i) {
    features[i] = build_features(pbats[i], query_meta(queries.traces[i]), tar.num_classes());
  }
  const fs::path dir(f.out_dir);
  ensure_dir(dir);
  std::ostringstream pbat_text, csv_text;
  write_pbat_jsonl(pbat_text, pbats, metric);
  write_features_csv(csv_text, features);
  write_text(dir / "pbat.jsonl", pbat_text.str());
  write_text(dir / "features.csv", csv_text.str());

  Manifest manifest("score", 0);
  manifest.add_input("tar", f.tar_path);
  manifest.add_input("queries", f.queries_path);
  manifest.set_config({{"k", f.k},
                       {"distance", std::string(distance_name(metric))},
                       {"exclude_self", f.exclude_self}});
  manifest.write(dir);
  out << "scored " << pbats.size() << " queries at k=" << f.k << " ("
      << distance_name(metric) << ") -> " << dir.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const ExperimentFlags& f, std::ostream& out) {
  const SweepConfig config = f.resolve();
  const auto tar = load_tar(f.tar_path);
  const Dataset queries = load_queries(f.queries_path);
  check_compatible(tar, queries);
  const auto bank = compute_feature_bank(tar, queries.traces, config.k_values, config.distance,
                                         config.threads, config.exclude_self);
  const auto sweep = run_sweep(bank, queries.traces, config);

  const fs::path dir(f.out_dir);
  ensure_dir(dir);
  write_text(dir / "sweep.json", to_json(sweep).dump(2) + "\n");
  write_text(dir / "splits.json", to_json(sweep.splits, queries.traces).dump() + "\n");
  Manifest manifest("sweep", config.seed);
  manifest.add_input("tar", f.tar_path);
  manifest.add_input("queries", f.queries_path);
  if (!f.config_path.empty()) manifest.add_input("config", f.config_path);
  manifest.set_config(to_json(config));
  manifest.write(dir);
  out << format_sweep_table(sweep);
  return kExitOk;
}

struct EvaluateFlags {
  ExperimentFlags common;
  std::size_t k_dc = 0, k_lu = 0;
  std::string sweep_path;
  bool curves = false;
  CLI::Option* k_dc_opt = nullptr;
  CLI::Option* k_lu_opt = nullptr;
};

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out) {
  SweepConfig config = f.common.resolve();
  const auto tar = load_tar(f.common.tar_path);
  const Dataset queries = load_queries(f.common.queries_path);
  check_compatible(tar, queries);

  std::size_t k_dc = f.k_dc, k_lu = f.k_lu;
  const bool explicit_ks = f.k_dc_opt->count() > 0 && f.k_lu_opt->count() > 0;
  std::optional<SweepResult> sweep;
  if (!explicit_ks && !f.sweep_path.empty()) {
    const json s = read_json_file(f.sweep_path);
    try {
      k_dc = s.at("best_k").at("DC").get<std::size_t>();
      k_lu = s.at("best_k").at("LU").get<std::size_t>();
    } catch (const json::exception& e) {
      fail(ErrorCode::InvalidConfig, "'" + f.sweep_path + "': field 'best_k': " + e.what());
    }
  }
  if (f.k_dc_opt->count() > 0) k_dc = f.k_dc;
  if (f.k_lu_opt->count() > 0) k_lu = f.k_lu;

  std::vector<std::size_t> ks = config.k_values;
  ks.push_back(k_dc == 0 ? ks.front() : k_dc);
  ks.push_back(k_lu == 0 ? ks.front() : k_lu);
  const auto bank = compute_feature_bank(tar, queries.traces, ks, config.distance, config.threads,
                                         config.exclude_self);
  if (k_dc == 0 || k_lu == 0) {
    // No k given for some measure: select it on validation first.
    sweep = run_sweep(bank, queries.traces, config);
    if (k_dc == 0) k_dc = sweep->best_k_dc;
    if (k_lu == 0) k_lu = sweep->best_k_lu;
  }
  const auto report = run_final(bank, queries.traces, k_dc, k_lu, config, f.curves);

  const fs::path dir(f.common.out_dir);
  ensure_dir(dir);
  if (sweep) write_text(dir / "sweep.json", to_json(*sweep).dump(2) + "\n");
  write_text(dir / "final.json", to_json(report).dump(2) + "\n");
  write_text(dir / "splits.json", to_json(report.splits, queries.traces).dump() + "\n");
  std::ostringstream csv, pbat_text;
  write_features_csv(csv, merge_features(bank.at(k_dc), bank.at(k_lu)));
  write_text(dir / "features.csv", csv.str());
  write_pbat_jsonl(pbat_text, bank.pbats, config.distance);
  write_text(dir / "pbat.jsonl", pbat_text.str());
  if (f.curves) {
    for (const auto& m : report.models) {
      if (!m.model) continue;
      std::ostringstream roc, prp, prn;
      write_roc_csv(roc, m.report.roc);
      write_pr_csv(prp, m.report.pr_pos);
      write_pr_csv(prn, m.report.pr_neg);
      std::string stem = m.name;
      std::replace(stem.begin(), stem.end(), '+', '_');
      write_text(dir / ("roc_" + stem + ".csv"), roc.str());
      write_text(dir / ("pr_pos_" + stem + ".csv"), prp.str());
      write_text(dir / ("pr_neg_" + stem + ".csv"), prn.str());
    }
  }
  Manifest manifest("evaluate", config.seed);
  manifest.add_input("tar", f.common.tar_path);
  manifest.add_input("queries", f.common.queries_path);
  if (!f.common.config_path.empty()) manifest.add_input("config", f.common.config_path);
  if (!f.sweep_path.empty()) manifest.add_input("sweep", f.sweep_path);
  json cfg = to_json(config);
  cfg["k_dc"] = k_dc;
  cfg["k_lu"] = k_lu;
  manifest.set_config(cfg);
  manifest.write(dir);
  if (sweep) out << format_sweep_table(*sweep) << "\n";
  out << format_final_table(report);
  return kExitOk;
}

struct SynthFlags {
  std::string config_path, out_dir;
  std::size_t classes = 0, n_train = 0, n_query = 0;
  std::vector<std::size_t> dims;
  std::vector<double> separation;
  double noise = 0.0, latent_noise = 0.0, label_noise = 0.0;
  std::uint64_t seed = 0;
  CLI::Option *classes_opt{}, *n_train_opt{}, *n_query_opt{}, *dims_opt{}, *sep_opt{},
      *noise_opt{}, *latent_opt{}, *label_noise_opt{}, *seed_opt{};
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  SyntheticSpec spec;
  if (!f.config_path.empty()) spec = synthetic_spec_from_json(read_json_file(f.config_path));
  if (f.classes_opt->count()) spec.num_classes = f.classes;
  if (f.n_train_opt->count()) spec.n_train = f.n_train;
  if (f.n_query_opt->count()) spec.n_query = f.n_query;
  if (f.dims_opt->count()) spec.dims = f.dims;
  if (f.sep_opt->count()) spec.separation = f.separation;
  if (f.noise_opt->count()) spec.noise = f.noise;
  if (f.latent_opt->count()) spec.latent_noise = f.latent_noise;
  if (f.label_noise_opt->count()) spec.label_noise = f.label_noise;
  if (f.seed_opt->count()) spec.seed = f.seed;
  if (f.sep_opt->count() && spec.separation.size() == 1 && spec.dims.size() > 1) {
    spec.separation.assign(spec.dims.size(), spec.separation.front());
  }

  const auto data = generate_synthetic(spec);
  const fs::path dir(f.out_dir);
  ensure_dir(dir);
  tard::write_dataset(dir / "repository.tard", data.repository);
  tard::write_dataset(dir / "queries.tard", data.queries);
  std::size_t correct = 0;
  for (const auto& t : data.queries.traces) correct += t.is_correct() ? 1 : 0;
  const double accuracy = static_cast<double>(correct) / static_cast<double>(data.queries.traces.size());
  json sidecar = {{"spec", to_json(spec)},
                  {"accuracy", accuracy},
                  {"layer_names", json::array()}};
  for (const auto& ls : data.repository.header.layer_specs) sidecar["layer_names"].push_back(ls.name);
  write_text(dir / "synth.json", sidecar.dump(2) + "\n");
  Manifest manifest("synth", spec.seed);
  if (!f.config_path.empty()) manifest.add_input("config", f.config_path);
  manifest.set_config(to_json(spec));
  manifest.write(dir);
  out << "wrote " << spec.n_train << " repository and " << spec.n_query
      << " query traces to " << dir.string() << " (simulated accuracy "
      << format_double(accuracy) << ")\n";
  return kExitOk;
}

int cmd_metrics(const std::string& features_path, const std::string& column,
                const std::string& out_dir, std::ostream& out) {
  std::ifstream in(features_path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + features_path + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::InvalidConfig, "'" + features_path + "' is empty");
  const auto header = split(line);
  const auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorCode::InvalidConfig, "column '" + name + "' not found");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t correct_col = find("correct");
  const std::size_t score_col = find(column);
  std::vector<ScoredSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(header.size()) + " fields");
    }
    const auto& c = cells[correct_col];
    if (c != "0" && c != "1") {
      fail(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": field 'correct' must be 0 or 1");
    }
    try {
      samples.push_back({std::stod(cells[score_col]), c == "1"});
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": field '" + column +
                                         "' is not a number");
    }
  }
  const auto report = evaluate_scores(samples, !out_dir.empty());
  json j = to_json(report);
  j["score_column"] = column;
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    ensure_dir(dir);
    write_text(dir / "metrics.json", j.dump(2) + "\n");
    std::ostringstream roc, prp, prn;
    write_roc_csv(roc, report.roc);
    write_pr_csv(prp, report.pr_pos);
    write_pr_csv(prn, report.pr_neg);
    write_text(dir / "roc.csv", roc.str());
    write_text(dir / "pr_pos.csv", prp.str());
    write_text(dir / "pr_neg.csv", prn.str());
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s: AUROC %.2f  AUPR+ %.2f  AUPR- %.2f  (n_pos=%zu n_neg=%zu)\n",
                column.c_str(), 100 * report.auroc, 100 * report.aupr_pos, 100 * report.aupr_neg,
                report.n_pos, report.n_neg);
  out << buf;
  return kExitOk;
}

int cmd_report(const std::string& run_dir, std::ostream& out) {
  const fs::path dir(run_dir);
  bool any = false;
  if (fs::exists(dir / "sweep.json")) {
    out << format_sweep_table(read_json_file(dir / "sweep.json"));
    any = true;
  }
  if (fs::exists(dir / "final.json")) {
    if (any) out << "\n";
    out << format_final_table(read_json_file(dir / "final.json"));
    any = true;
  }
  if (!any) fail(ErrorCode::Io, "no sweep.json or final.json in '" + dir.string() + "'");
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  if (is_io_error(code)) return kExitIo;
  return kExitValidation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layer-wise nearest-neighbor uncertainty quantification", "lwuq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string bt_input, bt_output;
  auto* build = app.add_subcommand("build-tar", "Validate a repository file and persist the TAR");
  build->add_option("--input", bt_input, "Repository file (TARD, kind=repository)")->required();
  build->add_option("--output", bt_output, "Output TAR file")->required();

  ScoreFlags sf;
  auto* score = app.add_subcommand("score", "Build PBATs and DC/LU features for a query set");
  score->add_option("--tar", sf.tar_path, "Training activation repository")->required();
  score->add_option("--queries", sf.queries_path, "Query set")->required();
  score->add_option("--k", sf.k, "Neighbors per layer")->required();
  score->add_option("--distance", sf.distance, "braycurtis | euclidean | cosine");
  score->add_option("--out", sf.out_dir, "Run directory")->required();
  sf.threads_opt = score->add_option("--threads", sf.threads, "Worker threads (env UQ_THREADS)");
  score->add_flag("--exclude-self", sf.exclude_self, "Skip each query's own sample_id");

  std::string m_features, m_column = "sm", m_out;
  auto* metrics = app.add_subcommand("metrics", "AUROC / AUPR of one feature column");
  metrics->add_option("--features", m_features, "features.csv")->required();
  metrics->add_option("--score-column", m_column, "Column used as confidence score");
  metrics->add_option("--out", m_out, "Directory for metrics.json and curve CSVs");

  ExperimentFlags sw;
  auto* sweep = app.add_subcommand("sweep", "Select k per measure on the validation split");
  sw.attach(sweep, true);

  EvaluateFlags ev;
  auto* evaluate = app.add_subcommand("evaluate", "Compare None/SM/DC/LU/DC+LU/SM+DC+LU on test");
  ev.common.attach(evaluate, true);
  ev.k_dc_opt = evaluate->add_option("--k-dc", ev.k_dc, "k for DC features");
  ev.k_lu_opt = evaluate->add_option("--k-lu", ev.k_lu, "k for LU features");
  evaluate->add_option("--sweep", ev.sweep_path, "sweep.json providing best k per measure");
  evaluate->add_flag("--curves", ev.curves, "Write ROC/PR curve CSVs");

  SynthFlags sy;
  auto* synth = app.add_subcommand("synth", "Generate synthetic repository and query files");
  synth->add_option("--config", sy.config_path, "JSON synthetic spec");
  synth->add_option("--out", sy.out_dir, "Output directory")->required();
  sy.classes_opt = synth->add_option("--classes", sy.classes, "Number of classes");
  sy.dims_opt = synth->add_option("--dims", sy.dims, "Per-layer dims, e.g. 64,64,64,64")->delimiter(',');
  sy.n_train_opt = synth->add_option("--n-train", sy.n_train, "Repository size");
  sy.n_query_opt = synth->add_option("--n-query", sy.n_query, "Query set size");
  sy.sep_opt = synth->add_option("--separation", sy.separation, "Per-layer separation")->delimiter(',');
  sy.noise_opt = synth->add_option("--noise", sy.noise, "Noise scale");
  sy.latent_opt = synth->add_option("--latent-noise", sy.latent_noise, "Per-sample offset shared by all layers");
  sy.label_noise_opt = synth->add_option("--label-noise", sy.label_noise, "Training label noise");
  sy.seed_opt = synth->add_option("--seed", sy.seed, "Seed");

  std::string r_dir;
  auto* report = app.add_subcommand("report", "Print the tables stored in a run directory");
  report->add_option("--run", r_dir, "Run directory")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build) return cmd_build_tar(bt_input, bt_output, out);
    if (*score) return cmd_score(sf, out);
    if (*metrics) return cmd_metrics(m_features, m_column, m_out, out);
    if (*sweep) return cmd_sweep(sw, out);
    if (*evaluate) return cmd_evaluate(ev, out);
    if (*synth) return cmd_synth(sy, out);
    if (*report) return cmd_report(r_dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace lwuq::cli
