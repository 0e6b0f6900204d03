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

#pragma once

#include <span>
#include <string>
#include <string_view>

namespace lwuq {

enum class DistanceKind { BrayCurtis, Euclidean, Cosine };

// Accepts "braycurtis" (also "bray_curtis"), "euclidean" and "cosine",
// case-insensitively. Throws InvalidConfig otherwise.
DistanceKind parse_distance_kind(std::string_view text);

// Canonical flag spelling.
std::string_view distance_name(DistanceKind kind) noexcept;

// All kernels accumulate in double over float storage, in index order.
// Inputs must have equal, non-zero length (DimensionMismatch otherwise).

// sum|u-v| / sum|u+v|; two all-zero vectors give 0.
double bray_curtis(std::span<const float> u, std::span<const float> v);

double euclidean(std::span<const float> u, std::span<const float> v);

// 1 - cos(u, v), clamped to [0, 2]. Returns 1 if either vector has zero norm.
double cosine(std::span<const float> u, std::span<const float> v);

double distance(DistanceKind kind, std::span<const float> u, std::span<const float> v);

// True when the cosine kernel would fall back to its neutral value.
bool is_zero_norm(std::span<const float> u);

}  // namespace lwuq
