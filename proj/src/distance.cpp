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

#include "lwuq/distance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "lwuq/error.hpp"

namespace lwuq {

namespace {

void check_dims(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size() || u.empty()) {
    fail(ErrorCode::DimensionMismatch, "distance operands have lengths " +
                                           std::to_string(u.size()) + " and " +
                                           std::to_string(v.size()));
  }
}

}  // namespace

DistanceKind parse_distance_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "braycurtis" || lower == "bray_curtis" || lower == "bray-curtis") {
    return DistanceKind::BrayCurtis;
  }
  if (lower == "euclidean") return DistanceKind::Euclidean;
  if (lower == "cosine") return DistanceKind::Cosine;
  fail(ErrorCode::InvalidConfig, "unknown distance '" + std::string(text) +
                                     "' (expected braycurtis, euclidean or cosine)");
}

std::string_view distance_name(DistanceKind kind) noexcept {
  switch (kind) {
    case DistanceKind::BrayCurtis: return "braycurtis";
    case DistanceKind::Euclidean: return "euclidean";
    case DistanceKind::Cosine: return "cosine";
  }
  return "braycurtis";
}

double bray_curtis(std::span<const float> u, std::span<const float> v) {
  check_dims(u, v);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i];
    const double b = v[i];
    num += std::abs(a - b);
    den += std::abs(a + b);
  }
  if (num == 0.0) return 0.0;
  // den == 0 with num > 0 needs u == -v; report the kernel's upper bound.
  if (den == 0.0) return 1.0;
  return num / den;
}

double euclidean(std::span<const float> u, std::span<const float> v) {
  check_dims(u, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = static_cast<double>(u[i]) - static_cast<double>(v[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

double cosine(std::span<const float> u, std::span<const float> v) {
  check_dims(u, v);
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i];
    const double b = v[i];
    dot += a * b;
    nu += a * a;
    nv += b * b;
  }
  if (nu == 0.0 || nv == 0.0) return 1.0;
  // sqrt(nu * nv) rather than sqrt(nu) * sqrt(nv): exact for u == v.
  const double d = 1.0 - dot / std::sqrt(nu * nv);
  return std::clamp(d, 0.0, 2.0);
}

double distance(DistanceKind kind, std::span<const float> u, std::span<const float> v) {
  switch (kind) {
    case DistanceKind::BrayCurtis: return bray_curtis(u, v);
    case DistanceKind::Euclidean: return euclidean(u, v);
    case DistanceKind::Cosine: return cosine(u, v);
  }
  return bray_curtis(u, v);
}

bool is_zero_norm(std::span<const float> u) {
  return std::all_of(u.begin(), u.end(), [](float x) { return x == 0.0f; });
}

}  // namespace lwuq
