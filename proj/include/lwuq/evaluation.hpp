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

// Hit/miss detection metrics. A sample's score is a confidence that the
// underlying prediction is correct; its label says whether it was.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lwuq {

struct ScoredSample {
  double score = 0.0;
  bool correct = false;
};

enum class PositiveClass { Correct, Incorrect };

/// Mann-Whitney statistic (wins + ties / 2) / (P * N) over (correct,
/// incorrect) pairs, via one sort and tie-group aggregation.
/// Throws SingleClass, NonFiniteValue.
double auroc(std::span<const ScoredSample> samples);

/// Average precision: sum over descending-score tie groups of
/// (R_t - R_{t-1}) * P_t. For Incorrect the scores are negated, so low
/// confidence ranks first. Throws NoPositives, NonFiniteValue.
double aupr(std::span<const ScoredSample> samples, PositiveClass positive);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double tpr = 0.0, fpr = 0.0, precision = 1.0, recall = 0.0;
};

/// Correct is the positive class; score >= threshold predicts positive.
/// Precision is 1 when nothing is predicted positive; a rate whose
/// denominator is empty is 0.
Confusion confusion_at(std::span<const ScoredSample> samples, double threshold);

struct RocPoint {
  double threshold, fpr, tpr;
};
struct PrPoint {
  double threshold, recall, precision;
};

/// One point per tie group, starting from (0, 0) at threshold +inf.
std::vector<RocPoint> roc_curve(std::span<const ScoredSample> samples);
/// One point per tie group, starting from recall 0 / precision 1. For
/// Incorrect the thresholds are on the negated score.
std::vector<PrPoint> pr_curve(std::span<const ScoredSample> samples, PositiveClass positive);

struct Baselines {
  double auroc = 0.5;
  double aupr_pos = 0.0;  // fraction correct
  double aupr_neg = 0.0;  // fraction incorrect
};

Baselines baselines_of(std::span<const ScoredSample> samples);

struct CurveReport {
  double auroc = 0.0;
  double aupr_pos = 0.0;
  double aupr_neg = 0.0;
  Baselines baselines;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::vector<RocPoint> roc;
  std::vector<PrPoint> pr_pos;
  std::vector<PrPoint> pr_neg;
};

CurveReport evaluate_scores(std::span<const ScoredSample> samples, bool with_curves = false);

struct SplitFractions {
  double test = 0.2;
  double val_of_train = 0.2;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Seeded Fisher-Yates shuffle of 0..n-1, then contiguous slices
/// [test | validation | train]. |test| = floor(n * test),
/// |validation| = floor((n - |test|) * val_of_train), the rest is train.
/// Each slice is returned sorted. Throws TooFewSamples for n < 5.
SplitIndices split_dataset(std::size_t n, const SplitFractions& fractions, std::uint64_t seed);

}  // namespace lwuq
