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

// Logistic-regression combiners that map uncertainty features to the
// probability that a prediction is correct.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "lwuq/uq_metrics.hpp"

namespace lwuq {

struct FeatureSubsetSpec {
  bool use_sm = false;
  bool use_dc = false;
  bool use_lu = false;

  void validate() const;  // InvalidConfig unless at least one flag is set
  std::string name() const;  // "SM", "DC+LU", ...

  bool operator==(const FeatureSubsetSpec&) const = default;
};

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols, cols);
  }
};

/// Column layout for a subset: sm, then dc_1..dc_{L-1}, then lu_0..lu_{L-1}.
/// DC and LU may come from feature vectors computed at different k; pass the
/// same vector twice when they share one.
Matrix design_matrix(std::span<const UqFeatureVector> dc_source,
                     std::span<const UqFeatureVector> lu_source, const FeatureSubsetSpec& subset);

std::vector<std::string> column_names(const FeatureSubsetSpec& subset, std::size_t num_layers);

struct FitOptions {
  double l2 = 1e-4;
  std::size_t max_iters = 5000;
  double tolerance = 1e-6;  // on the gradient infinity norm
};

struct ConvergenceRecord {
  std::size_t iterations = 0;
  bool converged = false;  // false means max_iters was hit
  double gradient_inf_norm = 0.0;
  double objective = 0.0;  // final penalized mean negative log-likelihood
};

struct LogisticModel {
  FeatureSubsetSpec subset;
  std::vector<double> means;
  std::vector<double> stds;   // > 0; zero-variance columns get 1
  std::vector<bool> frozen;   // zero-variance columns, weight pinned to 0
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;
  ConvergenceRecord convergence;

  std::size_t num_columns() const { return weights.size(); }
};

/// Penalized objective over standardized features:
///   J(w, b) = mean_i [log(1 + e^{z_i}) - y_i z_i] + (l2 / 2) |w|^2,
///   z_i = x_i . w + b.
/// The bias is not penalized. `params` holds w followed by b.
class LogisticObjective {
 public:
  LogisticObjective(const Matrix& standardized, std::span<const std::uint8_t> targets, double l2);

  std::size_t num_params() const { return x_.cols + 1; }
  double value(std::span<const double> params) const;
  /// Returns J and writes dJ/dparams into `grad`.
  double value_and_gradient(std::span<const double> params, std::span<double> grad) const;

 private:
  const Matrix& x_;
  std::span<const std::uint8_t> y_;
  double l2_;
};

/// Full-batch gradient descent with Armijo backtracking from zero weights.
/// Deterministic. Throws EmptyFeatures, NonFiniteFeature, SingleClassTarget,
/// DimensionMismatch.
LogisticModel fit(const Matrix& features, std::span<const std::uint8_t> targets,
                  const FeatureSubsetSpec& subset, const FitOptions& options = {});

/// The objective values of every accepted step, recorded when non-null.
LogisticModel fit(const Matrix& features, std::span<const std::uint8_t> targets,
                  const FeatureSubsetSpec& subset, const FitOptions& options,
                  std::vector<double>* objective_trace);

/// sigmoid(standardized x . w + b) for every row. Throws DimensionMismatch.
std::vector<double> predict_scores(const LogisticModel& model, const Matrix& features);

Matrix standardize(const LogisticModel& model, const Matrix& features);

nlohmann::json to_json(const LogisticModel& model);
LogisticModel model_from_json(const nlohmann::json& j);

}  // namespace lwuq
