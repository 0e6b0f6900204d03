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

#include "lwuq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lwuq/error.hpp"

namespace lwuq {

namespace {

struct TieGroup {
  double score;
  std::size_t positives;
  std::size_t negatives;
};

// Groups samples by equal score in descending order, counting the chosen
// positive class. For Incorrect the score is negated.
std::vector<TieGroup> tie_groups(std::span<const ScoredSample> samples, PositiveClass positive) {
  std::vector<std::pair<double, bool>> items;
  items.reserve(samples.size());
  for (const auto& s : samples) {
    if (!std::isfinite(s.score)) fail(ErrorCode::NonFiniteValue, "score is not finite");
    const bool is_pos = positive == PositiveClass::Correct ? s.correct : !s.correct;
    // + 0.0 folds -0.0 into +0.0 so that equal scores group together.
    const double score = (positive == PositiveClass::Correct ? s.score : -s.score) + 0.0;
    items.emplace_back(score, is_pos);
  }
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<TieGroup> groups;
  for (const auto& [score, is_pos] : items) {
    if (groups.empty() || groups.back().score != score) groups.push_back({score, 0, 0});
    (is_pos ? groups.back().positives : groups.back().negatives)++;
  }
  return groups;
}

std::size_t count_correct(std::span<const ScoredSample> samples) {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.correct; }));
}

// Uniform integer in [0, bound) by rejection, independent of the standard
// library's distribution implementations.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return r % bound;
  }
}

}  // namespace

double auroc(std::span<const ScoredSample> samples) {
  const auto groups = tie_groups(samples, PositiveClass::Correct);
  std::uint64_t pos = 0, neg = 0;
  for (const auto& g : groups) {
    pos += g.positives;
    neg += g.negatives;
  }
  if (pos == 0 || neg == 0) {
    fail(ErrorCode::SingleClass, "AUROC needs both correct and incorrect samples");
  }
  // Twice the statistic's numerator, kept in integers: each positive beats
  // every negative in a lower group and ties the negatives in its own group.
  std::uint64_t twice_wins = 0;
  std::uint64_t negatives_below = neg;
  for (const auto& g : groups) {
    negatives_below -= g.negatives;
    twice_wins += g.positives * (2 * negatives_below + g.negatives);
  }
  return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double aupr(std::span<const ScoredSample> samples, PositiveClass positive) {
  const auto groups = tie_groups(samples, positive);
  std::size_t total_pos = 0;
  for (const auto& g : groups) total_pos += g.positives;
  if (total_pos == 0) fail(ErrorCode::NoPositives, "AUPR needs at least one positive sample");

  double area = 0.0;
  std::size_t tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.positives;
    fp += g.negatives;
    if (g.positives == 0) continue;
    const double recall_step = static_cast<double>(g.positives) / static_cast<double>(total_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += recall_step * precision;
  }
  return area;
}

Confusion confusion_at(std::span<const ScoredSample> samples, double threshold) {
  Confusion c;
  for (const auto& s : samples) {
    const bool predicted = s.score >= threshold;
    if (s.correct) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  c.tpr = ratio(c.tp, c.tp + c.fn);
  c.fpr = ratio(c.fp, c.fp + c.tn);
  c.precision = c.tp + c.fp == 0 ? 1.0 : ratio(c.tp, c.tp + c.fp);
  c.recall = c.tpr;
  return c;
}

std::vector<RocPoint> roc_curve(std::span<const ScoredSample> samples) {
  const auto groups = tie_groups(samples, PositiveClass::Correct);
  std::size_t pos = 0, neg = 0;
  for (const auto& g : groups) {
    pos += g.positives;
    neg += g.negatives;
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  std::vector<RocPoint> curve;
  curve.reserve(groups.size() + 1);
  curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.positives;
    fp += g.negatives;
    curve.push_back({g.score, ratio(fp, neg), ratio(tp, pos)});
  }
  return curve;
}

std::vector<PrPoint> pr_curve(std::span<const ScoredSample> samples, PositiveClass positive) {
  const auto groups = tie_groups(samples, positive);
  std::size_t total_pos = 0;
  for (const auto& g : groups) total_pos += g.positives;
  std::vector<PrPoint> curve;
  curve.reserve(groups.size() + 1);
  curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  std::size_t tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.positives;
    fp += g.negatives;
    const double recall =
        total_pos == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(total_pos);
    curve.push_back({g.score, recall, static_cast<double>(tp) / static_cast<double>(tp + fp)});
  }
  return curve;
}

Baselines baselines_of(std::span<const ScoredSample> samples) {
  Baselines b;
  if (samples.empty()) return b;
  const std::size_t pos = count_correct(samples);
  const double n = static_cast<double>(samples.size());
  b.aupr_pos = static_cast<double>(pos) / n;
  b.aupr_neg = static_cast<double>(samples.size() - pos) / n;
  return b;
}

CurveReport evaluate_scores(std::span<const ScoredSample> samples, bool with_curves) {
  CurveReport r;
  r.n_pos = count_correct(samples);
  r.n_neg = samples.size() - r.n_pos;
  r.auroc = auroc(samples);
  r.aupr_pos = aupr(samples, PositiveClass::Correct);
  r.aupr_neg = aupr(samples, PositiveClass::Incorrect);
  r.baselines = baselines_of(samples);
  if (with_curves) {
    r.roc = roc_curve(samples);
    r.pr_pos = pr_curve(samples, PositiveClass::Correct);
    r.pr_neg = pr_curve(samples, PositiveClass::Incorrect);
  }
  return r;
}

SplitIndices split_dataset(std::size_t n, const SplitFractions& fractions, std::uint64_t seed) {
  if (n < 5) fail(ErrorCode::TooFewSamples, "need at least 5 samples to split, got " + std::to_string(n));
  if (!(fractions.test > 0.0 && fractions.test < 1.0) ||
      !(fractions.val_of_train >= 0.0 && fractions.val_of_train < 1.0)) {
    fail(ErrorCode::InvalidConfig, "split fractions must lie in (0,1) and [0,1)");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[uniform_below(rng, i + 1)]);
  }
  // The epsilon absorbs representation error in products such as 10 * 0.2.
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fractions.test + 1e-9));
  const std::size_t remaining = n - n_test;
  const auto n_val =
      static_cast<std::size_t>(std::floor(static_cast<double>(remaining) * fractions.val_of_train + 1e-9));

  SplitIndices out;
  const auto b = perm.begin();
  out.test.assign(b, b + static_cast<std::ptrdiff_t>(n_test));
  out.validation.assign(b + static_cast<std::ptrdiff_t>(n_test),
                        b + static_cast<std::ptrdiff_t>(n_test + n_val));
  out.train.assign(b + static_cast<std::ptrdiff_t>(n_test + n_val), perm.end());
  std::sort(out.test.begin(), out.test.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.train.begin(), out.train.end());
  return out;
}

}  // namespace lwuq
