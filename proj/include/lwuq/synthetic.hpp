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

// Synthetic layer activations with controllable class structure, standing in
// for a trained network's exported traces.
//
// At layer l, class c sits at an anchor 1 + s_l * e_c, where e_c is a unit
// vector spread evenly over the coordinates j with j % C == c (so all anchor
// pairs are s_l * sqrt(2) apart). Layers narrower than C put class c on axis
// c % dim instead.
//
// Each sample draws a difficulty r ~ Exp(1) and a direction g ~ N(0, I_C),
// shared by all of its layers, and adds s_l * latent_noise * r * sum_c g_c e_c
// at layer l. Hard samples thus stray far from their anchor at every depth. Each layer then adds its own
// isotropic Gaussian noise of scale `noise`.
// The simulated network predicts the class of the nearest last-layer anchor
// and reports the Gaussian posterior of that class as its softmax confidence.

#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "lwuq/core_model.hpp"

namespace lwuq {

/// Moves queries of two classes toward each other's anchor at one layer.
/// The query center becomes mix * own_anchor + (1 - mix) * other_anchor.
/// Training samples are unaffected.
struct AnchorSwap {
  std::size_t layer = 0;
  ClassId class_a = 0;
  ClassId class_b = 1;
  double mix = 0.25;
};

struct SyntheticSpec {
  std::size_t num_classes = 10;
  std::vector<std::size_t> dims{64, 64, 64, 64};
  std::size_t n_train = 1000;
  std::size_t n_query = 500;
  std::vector<double> separation{1.0, 1.0, 1.0, 1.0};
  double noise = 1.0;
  /// Scale of the per-sample offset shared across layers.
  double latent_noise = 0.0;
  /// Fraction of training labels replaced by a different random class.
  double label_noise = 0.0;
  /// Divides the log-posterior before the softmax; 1 is the exact posterior.
  double softmax_temperature = 1.0;
  std::vector<AnchorSwap> swaps;
  std::uint64_t seed = 0;

  std::size_t num_layers() const { return dims.size(); }
  void validate() const;  // InvalidSpec
};

struct SyntheticData {
  Dataset repository;
  Dataset queries;
};

/// Deterministic under spec.seed. Training ids are 0..n_train-1 and query
/// ids follow on from n_train. Sample i belongs to class i % C.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

nlohmann::json to_json(const SyntheticSpec& spec);
/// Missing fields keep their defaults. Throws InvalidConfig naming the field.
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

}  // namespace lwuq
