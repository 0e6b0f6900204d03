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

// Shared data model: layer descriptions, per-sample activation traces and
// dataset headers. All types are plain values and immutable once validated.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lwuq {

using SampleId = std::uint32_t;
using ClassId = std::uint16_t;

struct LayerSpec {
  std::size_t layer_index = 0;
  std::size_t dim = 0;  // flattened activation width
  std::string name;

  bool operator==(const LayerSpec&) const = default;
};

enum class DatasetKind : std::uint8_t { Repository = 0, QuerySet = 1 };

const char* kind_name(DatasetKind kind) noexcept;

struct DatasetHeader {
  std::size_t num_layers = 0;
  std::size_t num_samples = 0;
  std::size_t num_classes = 0;
  std::vector<LayerSpec> layer_specs;
  DatasetKind kind = DatasetKind::Repository;

  // Throws InvalidHeader unless N >= 1, C >= 2, L >= 1, the layer specs are
  // contiguous 0..L-1 and every dim is positive.
  void validate() const;

  std::size_t dim(std::size_t layer) const { return layer_specs[layer].dim; }

  bool operator==(const DatasetHeader&) const = default;
};

// Builds contiguous layer specs named "layer_<i>".
std::vector<LayerSpec> make_layer_specs(std::span<const std::size_t> dims);

struct ActivationTrace {
  SampleId sample_id = 0;
  std::vector<std::vector<float>> activations;  // one vector per layer
  ClassId true_label = 0;
  std::optional<ClassId> predicted_label;
  std::optional<float> softmax_confidence;

  bool is_correct() const {
    return predicted_label.has_value() && *predicted_label == true_label;
  }
};

// Bit-exact comparison of activations and confidence (so that NaN payloads
// and signed zeros are distinguished).
bool bit_equal(const ActivationTrace& a, const ActivationTrace& b);

struct Dataset {
  DatasetHeader header;
  std::vector<ActivationTrace> traces;
};

bool bit_equal(const Dataset& a, const Dataset& b);

// Checks one trace against a well-formed header. Throws DimensionMismatch,
// NonFiniteValue, LabelOutOfRange or MissingPredictionFields; the message
// names the sample id and, where relevant, the layer.
void validate_trace(const ActivationTrace& trace, const DatasetHeader& header);

// Validates the header, the trace count and every trace.
void validate_dataset(const Dataset& dataset);

// A strided view over a multi-axis activation tensor. Empty strides mean a
// contiguous row-major layout.
struct TensorView {
  std::span<const float> data;
  std::vector<std::size_t> shape;
  std::vector<std::size_t> strides;
};

// Row-major flattening (last axis fastest). Values are copied bit-for-bit.
// Throws EmptyTensor for a tensor with no axes or a zero-sized axis.
std::vector<float> flatten_activation(const TensorView& tensor);

}  // namespace lwuq
