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

#include "lwuq/core_model.hpp"

#include <cmath>
#include <cstring>
#include <unordered_set>

#include "lwuq/error.hpp"

namespace lwuq {

namespace {

std::string sample_tag(const ActivationTrace& trace) {
  return "sample_id " + std::to_string(trace.sample_id);
}

bool floats_bit_equal(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

}  // namespace

const char* kind_name(DatasetKind kind) noexcept {
  return kind == DatasetKind::Repository ? "repository" : "queryset";
}

void DatasetHeader::validate() const {
  if (num_samples < 1) fail(ErrorCode::InvalidHeader, "num_samples must be >= 1");
  if (num_classes < 2) fail(ErrorCode::InvalidHeader, "num_classes must be >= 2");
  if (num_layers < 1) fail(ErrorCode::InvalidHeader, "num_layers must be >= 1");
  if (layer_specs.size() != num_layers) {
    fail(ErrorCode::InvalidHeader, "expected " + std::to_string(num_layers) +
                                       " layer specs, got " + std::to_string(layer_specs.size()));
  }
  for (std::size_t l = 0; l < layer_specs.size(); ++l) {
    if (layer_specs[l].layer_index != l) {
      fail(ErrorCode::InvalidHeader, "layer indices must be contiguous from 0; position " +
                                         std::to_string(l) + " has index " +
                                         std::to_string(layer_specs[l].layer_index));
    }
    if (layer_specs[l].dim < 1) {
      fail(ErrorCode::InvalidHeader, "layer " + std::to_string(l) + " has zero dim");
    }
  }
}

std::vector<LayerSpec> make_layer_specs(std::span<const std::size_t> dims) {
  std::vector<LayerSpec> specs;
  specs.reserve(dims.size());
  for (std::size_t l = 0; l < dims.size(); ++l) {
    specs.push_back({l, dims[l], "layer_" + std::to_string(l)});
  }
  return specs;
}

bool bit_equal(const ActivationTrace& a, const ActivationTrace& b) {
  if (a.sample_id != b.sample_id || a.true_label != b.true_label ||
      a.predicted_label != b.predicted_label ||
      a.softmax_confidence.has_value() != b.softmax_confidence.has_value() ||
      a.activations.size() != b.activations.size()) {
    return false;
  }
  if (a.softmax_confidence &&
      std::memcmp(&*a.softmax_confidence, &*b.softmax_confidence, sizeof(float)) != 0) {
    return false;
  }
  for (std::size_t l = 0; l < a.activations.size(); ++l) {
    if (!floats_bit_equal(a.activations[l], b.activations[l])) return false;
  }
  return true;
}

bool bit_equal(const Dataset& a, const Dataset& b) {
  if (!(a.header == b.header) || a.traces.size() != b.traces.size()) return false;
  for (std::size_t i = 0; i < a.traces.size(); ++i) {
    if (!bit_equal(a.traces[i], b.traces[i])) return false;
  }
  return true;
}

void validate_trace(const ActivationTrace& trace, const DatasetHeader& header) {
  if (trace.activations.size() != header.num_layers) {
    fail(ErrorCode::DimensionMismatch,
         sample_tag(trace) + " has " + std::to_string(trace.activations.size()) +
             " layers, header says " + std::to_string(header.num_layers));
  }
  for (std::size_t l = 0; l < header.num_layers; ++l) {
    const auto& vec = trace.activations[l];
    if (vec.size() != header.dim(l)) {
      fail(ErrorCode::DimensionMismatch,
           sample_tag(trace) + " layer " + std::to_string(l) + " has " +
               std::to_string(vec.size()) + " entries, expected " + std::to_string(header.dim(l)));
    }
    for (std::size_t j = 0; j < vec.size(); ++j) {
      if (!std::isfinite(vec[j])) {
        fail(ErrorCode::NonFiniteValue, sample_tag(trace) + " layer " + std::to_string(l) +
                                            " entry " + std::to_string(j) + " is not finite");
      }
    }
  }
  if (trace.true_label >= header.num_classes) {
    fail(ErrorCode::LabelOutOfRange, sample_tag(trace) + " true_label " +
                                         std::to_string(trace.true_label) + " not in 0.." +
                                         std::to_string(header.num_classes - 1));
  }
  if (header.kind == DatasetKind::QuerySet &&
      (!trace.predicted_label || !trace.softmax_confidence)) {
    fail(ErrorCode::MissingPredictionFields,
         sample_tag(trace) + " lacks predicted_label or softmax_confidence");
  }
  if (trace.predicted_label && *trace.predicted_label >= header.num_classes) {
    fail(ErrorCode::LabelOutOfRange, sample_tag(trace) + " predicted_label " +
                                         std::to_string(*trace.predicted_label) + " not in 0.." +
                                         std::to_string(header.num_classes - 1));
  }
  if (trace.softmax_confidence) {
    const float c = *trace.softmax_confidence;
    if (!std::isfinite(c)) {
      fail(ErrorCode::NonFiniteValue, sample_tag(trace) + " softmax_confidence is not finite");
    }
    if (c < 0.0f || c > 1.0f) {
      fail(ErrorCode::NonFiniteValue,
           sample_tag(trace) + " softmax_confidence " + std::to_string(c) + " outside [0,1]");
    }
  }
}

void validate_dataset(const Dataset& dataset) {
  dataset.header.validate();
  if (dataset.traces.size() != dataset.header.num_samples) {
    fail(ErrorCode::InvalidHeader, "header declares " +
                                       std::to_string(dataset.header.num_samples) +
                                       " samples, dataset holds " +
                                       std::to_string(dataset.traces.size()));
  }
  std::unordered_set<SampleId> seen;
  seen.reserve(dataset.traces.size());
  for (const auto& trace : dataset.traces) {
    validate_trace(trace, dataset.header);
    if (!seen.insert(trace.sample_id).second) {
      fail(ErrorCode::DuplicateSampleId,
           "sample_id " + std::to_string(trace.sample_id) + " appears more than once");
    }
  }
}

std::vector<float> flatten_activation(const TensorView& tensor) {
  const auto& shape = tensor.shape;
  if (shape.empty()) fail(ErrorCode::EmptyTensor, "tensor has no axes");
  std::size_t total = 1;
  for (std::size_t extent : shape) {
    if (extent == 0) fail(ErrorCode::EmptyTensor, "tensor has a zero-sized axis");
    total *= extent;
  }

  std::vector<std::size_t> strides = tensor.strides;
  if (strides.empty()) {
    strides.assign(shape.size(), 1);
    for (std::size_t a = shape.size() - 1; a > 0; --a) strides[a - 1] = strides[a] * shape[a];
  } else if (strides.size() != shape.size()) {
    fail(ErrorCode::DimensionMismatch, "strides and shape differ in rank");
  }
  std::size_t max_offset = 0;
  for (std::size_t a = 0; a < shape.size(); ++a) max_offset += (shape[a] - 1) * strides[a];
  if (max_offset >= tensor.data.size()) {
    fail(ErrorCode::DimensionMismatch, "tensor view reaches past its data");
  }

  std::vector<float> out;
  out.reserve(total);
  std::vector<std::size_t> index(shape.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t offset = 0;
    for (std::size_t a = 0; a < shape.size(); ++a) offset += index[a] * strides[a];
    const float value = tensor.data[offset];
    if (!std::isfinite(value)) fail(ErrorCode::NonFiniteValue, "tensor contains a non-finite value");
    out.push_back(value);
    for (std::size_t a = shape.size(); a-- > 0;) {
      if (++index[a] < shape[a]) break;
      index[a] = 0;
    }
  }
  return out;
}

}  // namespace lwuq
