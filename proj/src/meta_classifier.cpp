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

#include "lwuq/meta_classifier.hpp"

#include <algorithm>
#include <cmath>

#include "lwuq/error.hpp"

namespace lwuq {

namespace {

// Armijo sufficient-decrease constant and step bounds.
constexpr double kArmijo = 1e-4;
constexpr double kInitialStep = 1.0;
constexpr double kMaxStep = 64.0;
constexpr double kMinStep = 1e-20;

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::size_t layer_count(std::span<const UqFeatureVector> dc_source,
                        std::span<const UqFeatureVector> lu_source) {
  if (!lu_source.empty()) return lu_source.front().lu.size();
  if (!dc_source.empty()) return dc_source.front().dc.size() + 1;
  return 0;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void FeatureSubsetSpec::validate() const {
  if (!use_sm && !use_dc && !use_lu) {
    fail(ErrorCode::InvalidConfig, "feature subset must select at least one family");
  }
}

std::string FeatureSubsetSpec::name() const {
  std::string out;
  auto add = [&out](const char* part) {
    if (!out.empty()) out += '+';
    out += part;
  };
  if (use_sm) add("SM");
  if (use_dc) add("DC");
  if (use_lu) add("LU");
  return out.empty() ? "None" : out;
}

std::vector<std::string> column_names(const FeatureSubsetSpec& subset, std::size_t num_layers) {
  std::vector<std::string> names;
  if (subset.use_sm) names.emplace_back("sm");
  if (subset.use_dc) {
    for (std::size_t t = 1; t < num_layers; ++t) names.push_back("dc_" + std::to_string(t));
  }
  if (subset.use_lu) {
    for (std::size_t l = 0; l < num_layers; ++l) names.push_back("lu_" + std::to_string(l));
  }
  return names;
}

Matrix design_matrix(std::span<const UqFeatureVector> dc_source,
                     std::span<const UqFeatureVector> lu_source, const FeatureSubsetSpec& subset) {
  subset.validate();
  if (dc_source.size() != lu_source.size()) {
    fail(ErrorCode::DimensionMismatch, "DC and LU feature sources differ in row count");
  }
  const std::size_t layers = layer_count(dc_source, lu_source);
  const std::size_t cols = column_names(subset, layers).size();
  Matrix m(dc_source.size(), cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto& dcf = dc_source[r];
    const auto& luf = lu_source[r];
    if (dcf.query_id != luf.query_id || dcf.dc.size() + 1 != layers || luf.lu.size() != layers) {
      fail(ErrorCode::DimensionMismatch,
           "feature row " + std::to_string(r) + " is inconsistent across sources");
    }
    std::size_t c = 0;
    if (subset.use_sm) m.at(r, c++) = dcf.softmax_confidence;
    if (subset.use_dc) {
      for (auto bit : dcf.dc) m.at(r, c++) = bit;
    }
    if (subset.use_lu) {
      for (double h : luf.lu) m.at(r, c++) = h;
    }
  }
  return m;
}

LogisticObjective::LogisticObjective(const Matrix& standardized,
                                     std::span<const std::uint8_t> targets, double l2)
    : x_(standardized), y_(targets), l2_(l2) {}

double LogisticObjective::value(std::span<const double> params) const {
  const std::size_t d = x_.cols;
  double loss = 0.0;
  for (std::size_t i = 0; i < x_.rows; ++i) {
    const auto row = x_.row(i);
    double z = params[d];
    for (std::size_t j = 0; j < d; ++j) z += row[j] * params[j];
    loss += softplus(z) - (y_[i] ? z : 0.0);
  }
  double reg = 0.0;
  for (std::size_t j = 0; j < d; ++j) reg += params[j] * params[j];
  return loss / static_cast<double>(x_.rows) + 0.5 * l2_ * reg;
}

double LogisticObjective::value_and_gradient(std::span<const double> params,
                                             std::span<double> grad) const {
  const std::size_t d = x_.cols;
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < x_.rows; ++i) {
    const auto row = x_.row(i);
    double z = params[d];
    for (std::size_t j = 0; j < d; ++j) z += row[j] * params[j];
    const double y = y_[i] ? 1.0 : 0.0;
    loss += softplus(z) - y * z;
    const double residual = sigmoid(z) - y;
    for (std::size_t j = 0; j < d; ++j) grad[j] += residual * row[j];
    grad[d] += residual;
  }
  const double n = static_cast<double>(x_.rows);
  double reg = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    grad[j] = grad[j] / n + l2_ * params[j];
    reg += params[j] * params[j];
  }
  grad[d] /= n;
  return loss / n + 0.5 * l2_ * reg;
}

Matrix standardize(const LogisticModel& model, const Matrix& features) {
  if (features.cols != model.num_columns()) {
    fail(ErrorCode::DimensionMismatch, "model expects " + std::to_string(model.num_columns()) +
                                           " columns, got " + std::to_string(features.cols));
  }
  Matrix out(features.rows, features.cols);
  for (std::size_t r = 0; r < features.rows; ++r) {
    for (std::size_t c = 0; c < features.cols; ++c) {
      out.at(r, c) = model.frozen[c] ? 0.0 : (features.at(r, c) - model.means[c]) / model.stds[c];
    }
  }
  return out;
}

LogisticModel fit(const Matrix& features, std::span<const std::uint8_t> targets,
                  const FeatureSubsetSpec& subset, const FitOptions& options) {
  return fit(features, targets, subset, options, nullptr);
}

LogisticModel fit(const Matrix& features, std::span<const std::uint8_t> targets,
                  const FeatureSubsetSpec& subset, const FitOptions& options,
                  std::vector<double>* objective_trace) {
  subset.validate();
  if (features.rows == 0 || features.cols == 0) {
    fail(ErrorCode::EmptyFeatures, "feature matrix is empty");
  }
  if (targets.size() != features.rows) {
    fail(ErrorCode::DimensionMismatch, "targets and features differ in row count");
  }
  for (double v : features.values) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteFeature, "feature matrix has a non-finite value");
  }
  const auto positives = static_cast<std::size_t>(std::count_if(
      targets.begin(), targets.end(), [](std::uint8_t t) { return t != 0; }));
  if (positives == 0 || positives == targets.size()) {
    fail(ErrorCode::SingleClassTarget, "training targets contain a single class");
  }
  if (!(options.l2 >= 0.0)) fail(ErrorCode::InvalidConfig, "l2 must be >= 0");

  const std::size_t n = features.rows;
  const std::size_t d = features.cols;
  LogisticModel model;
  model.subset = subset;
  model.l2 = options.l2;
  model.means.assign(d, 0.0);
  model.stds.assign(d, 1.0);
  model.frozen.assign(d, false);
  model.weights.assign(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += features.at(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dev = features.at(r, c) - mean;
      var += dev * dev;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    model.means[c] = mean;
    if (sd > 1e-12 * (1.0 + std::abs(mean))) {
      model.stds[c] = sd;
    } else {
      model.frozen[c] = true;
    }
  }

  const Matrix x = standardize(model, features);
  const LogisticObjective objective(x, targets, options.l2);
  std::vector<double> params(d + 1, 0.0);
  std::vector<double> grad(d + 1, 0.0);
  std::vector<double> trial(d + 1, 0.0);

  double value = objective.value_and_gradient(params, grad);
  if (objective_trace != nullptr) objective_trace->assign(1, value);
  double step = kInitialStep;
  ConvergenceRecord& record = model.convergence;
  for (;;) {
    for (std::size_t c = 0; c < d; ++c) {
      if (model.frozen[c]) grad[c] = 0.0;
    }
    record.gradient_inf_norm = inf_norm(grad);
    if (record.gradient_inf_norm < options.tolerance) {
      record.converged = true;
      break;
    }
    if (record.iterations >= options.max_iters) break;

    double grad_sq = 0.0;
    for (double g : grad) grad_sq += g * g;
    step = std::min(step * 2.0, kMaxStep);
    double trial_value = 0.0;
    for (;;) {
      for (std::size_t j = 0; j <= d; ++j) trial[j] = params[j] - step * grad[j];
      trial_value = objective.value(trial);
      if (trial_value <= value - kArmijo * step * grad_sq) break;
      step *= 0.5;
      if (step < kMinStep) break;
    }
    if (step < kMinStep) break;  // no descent possible at working precision

    params.swap(trial);
    value = objective.value_and_gradient(params, grad);
    ++record.iterations;
    if (objective_trace != nullptr) objective_trace->push_back(value);
  }
  record.objective = value;
  std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d), model.weights.begin());
  model.bias = params[d];
  return model;
}

std::vector<double> predict_scores(const LogisticModel& model, const Matrix& features) {
  const Matrix x = standardize(model, features);
  std::vector<double> scores(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const auto row = x.row(r);
    double z = model.bias;
    for (std::size_t c = 0; c < x.cols; ++c) z += row[c] * model.weights[c];
    scores[r] = sigmoid(z);
  }
  return scores;
}

nlohmann::json to_json(const LogisticModel& model) {
  nlohmann::json j;
  j["subset"] = {{"sm", model.subset.use_sm},
                 {"dc", model.subset.use_dc},
                 {"lu", model.subset.use_lu},
                 {"name", model.subset.name()}};
  j["means"] = model.means;
  j["stds"] = model.stds;
  j["frozen"] = model.frozen;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["l2"] = model.l2;
  j["convergence"] = {{"iterations", model.convergence.iterations},
                      {"converged", model.convergence.converged},
                      {"gradient_inf_norm", model.convergence.gradient_inf_norm},
                      {"objective", model.convergence.objective}};
  return j;
}

LogisticModel model_from_json(const nlohmann::json& j) {
  try {
    LogisticModel m;
    m.subset.use_sm = j.at("subset").at("sm").get<bool>();
    m.subset.use_dc = j.at("subset").at("dc").get<bool>();
    m.subset.use_lu = j.at("subset").at("lu").get<bool>();
    m.means = j.at("means").get<std::vector<double>>();
    m.stds = j.at("stds").get<std::vector<double>>();
    m.frozen = j.at("frozen").get<std::vector<bool>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.l2 = j.at("l2").get<double>();
    const auto& conv = j.at("convergence");
    m.convergence.iterations = conv.at("iterations").get<std::size_t>();
    m.convergence.converged = conv.at("converged").get<bool>();
    m.convergence.gradient_inf_norm = conv.at("gradient_inf_norm").get<double>();
    m.convergence.objective = conv.at("objective").get<double>();
    const std::size_t d = m.weights.size();
    if (m.means.size() != d || m.stds.size() != d || m.frozen.size() != d) {
      fail(ErrorCode::InvalidConfig, "model arrays differ in length");
    }
    for (double s : m.stds) {
      if (!(s > 0.0)) fail(ErrorCode::InvalidConfig, "model has a non-positive std");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace lwuq
