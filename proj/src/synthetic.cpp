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

#include "lwuq/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lwuq/error.hpp"

namespace lwuq {

namespace {

constexpr double kAnchorBase = 1.0;

// anchors[c] for one layer. Layers narrower than C put class c on axis
// c % dim, at a height that grows with c / dim so anchors stay distinct.
std::vector<std::vector<double>> layer_anchors(std::size_t num_classes, std::size_t dim,
                                               double separation) {
  std::vector<std::vector<double>> anchors(num_classes, std::vector<double>(dim, kAnchorBase));
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (dim >= num_classes) {
      const std::size_t count = (dim - c + num_classes - 1) / num_classes;
      const double height = separation / std::sqrt(static_cast<double>(count));
      for (std::size_t j = c; j < dim; j += num_classes) anchors[c][j] += height;
    } else {
      anchors[c][c % dim] += separation * static_cast<double>(1 + c / dim);
    }
  }
  return anchors;
}

double squared_distance(const std::vector<float>& x, const std::vector<double>& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = static_cast<double>(x[j]) - a[j];
    s += d * d;
  }
  return s;
}

template <typename T>
T field(const nlohmann::json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("field '") + name + "': " + e.what());
  }
}

}  // namespace

void SyntheticSpec::validate() const {
  if (num_classes < 2) fail(ErrorCode::InvalidSpec, "num_classes must be >= 2");
  if (num_classes > 0xFFFE) fail(ErrorCode::InvalidSpec, "num_classes must fit a u16 label");
  if (dims.empty()) fail(ErrorCode::InvalidSpec, "at least one layer is required");
  for (std::size_t d : dims) {
    if (d == 0) fail(ErrorCode::InvalidSpec, "layer dims must be positive");
  }
  if (n_train == 0 || n_query == 0) fail(ErrorCode::InvalidSpec, "n_train and n_query must be positive");
  if (separation.size() != dims.size()) {
    fail(ErrorCode::InvalidSpec, "separation schedule has " + std::to_string(separation.size()) +
                                     " entries for " + std::to_string(dims.size()) + " layers");
  }
  for (double s : separation) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorCode::InvalidSpec, "separations must be finite and >= 0");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) fail(ErrorCode::InvalidSpec, "noise must be finite and >= 0");
  if (!(latent_noise >= 0.0) || !std::isfinite(latent_noise)) {
    fail(ErrorCode::InvalidSpec, "latent_noise must be finite and >= 0");
  }
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) fail(ErrorCode::InvalidSpec, "label_noise must lie in [0,1]");
  if (!(softmax_temperature > 0.0)) fail(ErrorCode::InvalidSpec, "softmax_temperature must be > 0");
  if (static_cast<std::uint64_t>(n_train) + n_query > std::numeric_limits<SampleId>::max()) {
    fail(ErrorCode::InvalidSpec, "too many samples for u32 sample ids");
  }
  for (const auto& s : swaps) {
    if (s.layer >= dims.size() || s.class_a >= num_classes || s.class_b >= num_classes ||
        s.class_a == s.class_b || !(s.mix >= 0.0 && s.mix <= 1.0)) {
      fail(ErrorCode::InvalidSpec, "anchor swap at layer " + std::to_string(s.layer) + " is invalid");
    }
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t num_layers = spec.num_layers();
  const std::size_t num_classes = spec.num_classes;

  std::vector<std::vector<std::vector<double>>> anchors(num_layers);
  for (std::size_t l = 0; l < num_layers; ++l) {
    anchors[l] = layer_anchors(num_classes, spec.dims[l], spec.separation[l]);
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> difficulty(1.0);

  auto center_for = [&](std::size_t l, std::size_t c, bool is_query) {
    std::vector<double> center = anchors[l][c];
    if (!is_query) return center;
    for (const auto& s : spec.swaps) {
      if (s.layer != l || (c != s.class_a && c != s.class_b)) continue;
      const std::size_t other = c == s.class_a ? s.class_b : s.class_a;
      for (std::size_t j = 0; j < center.size(); ++j) {
        center[j] = s.mix * anchors[l][c][j] + (1.0 - s.mix) * anchors[l][other][j];
      }
    }
    return center;
  };

  std::vector<double> latent(num_classes);
  auto draw_trace = [&](SampleId id, std::size_t c, bool is_query) {
    if (spec.latent_noise > 0.0) {
      const double r = spec.latent_noise * difficulty(rng);
      for (auto& g : latent) g = r * gauss(rng);
    }
    ActivationTrace t;
    t.sample_id = id;
    t.true_label = static_cast<ClassId>(c);
    t.activations.resize(num_layers);
    for (std::size_t l = 0; l < num_layers; ++l) {
      auto center = center_for(l, c, is_query);
      if (spec.latent_noise > 0.0) {
        for (std::size_t k = 0; k < num_classes; ++k) {
          // anchors minus the base is s_l * e_k.
          for (std::size_t j = 0; j < center.size(); ++j) {
            center[j] += latent[k] * (anchors[l][k][j] - kAnchorBase);
          }
        }
      }
      auto& vec = t.activations[l];
      vec.resize(spec.dims[l]);
      for (std::size_t j = 0; j < vec.size(); ++j) {
        vec[j] = static_cast<float>(center[j] + spec.noise * gauss(rng));
      }
    }
    return t;
  };

  SyntheticData data;
  DatasetHeader header;
  header.num_layers = num_layers;
  header.num_classes = num_classes;
  header.layer_specs = make_layer_specs(spec.dims);

  data.repository.header = header;
  data.repository.header.kind = DatasetKind::Repository;
  data.repository.header.num_samples = spec.n_train;
  data.repository.traces.reserve(spec.n_train);
  for (std::size_t i = 0; i < spec.n_train; ++i) {
    ActivationTrace t = draw_trace(static_cast<SampleId>(i), i % num_classes, false);
    if (spec.label_noise > 0.0 && unit(rng) < spec.label_noise) {
      // Shift by 1..C-1 so the new label always differs.
      const auto shift = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(num_classes - 1));
      t.true_label = static_cast<ClassId>((t.true_label + std::min(shift, num_classes - 1)) % num_classes);
    }
    data.repository.traces.push_back(std::move(t));
  }

  // Gaussian posterior under equal priors: p(c | x) ~ exp(-|x - a_c|^2 / (2 v T)),
  // v the per-direction variance inside the anchor span at unit difficulty.
  const double s_last = spec.separation.back();
  const double variance =
      std::max(spec.noise * spec.noise + s_last * s_last * spec.latent_noise * spec.latent_noise, 1e-12) *
      spec.softmax_temperature;
  const std::size_t last = num_layers - 1;
  data.queries.header = header;
  data.queries.header.kind = DatasetKind::QuerySet;
  data.queries.header.num_samples = spec.n_query;
  data.queries.traces.reserve(spec.n_query);
  for (std::size_t i = 0; i < spec.n_query; ++i) {
    ActivationTrace t = draw_trace(static_cast<SampleId>(spec.n_train + i), i % num_classes, true);
    std::vector<double> sq(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) sq[c] = squared_distance(t.activations[last], anchors[last][c]);
    const auto best = static_cast<std::size_t>(std::min_element(sq.begin(), sq.end()) - sq.begin());
    double denom = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) denom += std::exp(-(sq[c] - sq[best]) / (2.0 * variance));
    t.predicted_label = static_cast<ClassId>(best);
    t.softmax_confidence = std::clamp(static_cast<float>(1.0 / denom), 0.0f, 1.0f);
    data.queries.traces.push_back(std::move(t));
  }
  return data;
}

nlohmann::json to_json(const SyntheticSpec& spec) {
  nlohmann::json swaps = nlohmann::json::array();
  for (const auto& s : spec.swaps) {
    swaps.push_back({{"layer", s.layer}, {"class_a", s.class_a}, {"class_b", s.class_b}, {"mix", s.mix}});
  }
  return {{"num_classes", spec.num_classes},
          {"dims", spec.dims},
          {"n_train", spec.n_train},
          {"n_query", spec.n_query},
          {"separation", spec.separation},
          {"noise", spec.noise},
          {"latent_noise", spec.latent_noise},
          {"label_noise", spec.label_noise},
          {"softmax_temperature", spec.softmax_temperature},
          {"swaps", swaps},
          {"seed", spec.seed}};
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, "synthetic spec must be a JSON object");
  SyntheticSpec s;
  s.num_classes = field(j, "num_classes", s.num_classes);
  s.dims = field(j, "dims", s.dims);
  s.n_train = field(j, "n_train", s.n_train);
  s.n_query = field(j, "n_query", s.n_query);
  s.separation = field(j, "separation", s.separation);
  s.noise = field(j, "noise", s.noise);
  s.latent_noise = field(j, "latent_noise", s.latent_noise);
  s.label_noise = field(j, "label_noise", s.label_noise);
  s.softmax_temperature = field(j, "softmax_temperature", s.softmax_temperature);
  s.seed = field(j, "seed", s.seed);
  if (j.contains("swaps")) {
    const auto& arr = j.at("swaps");
    if (!arr.is_array()) fail(ErrorCode::InvalidConfig, "field 'swaps': expected an array");
    for (const auto& item : arr) {
      AnchorSwap w;
      w.layer = field(item, "layer", w.layer);
      w.class_a = field(item, "class_a", w.class_a);
      w.class_b = field(item, "class_b", w.class_b);
      w.mix = field(item, "mix", w.mix);
      s.swaps.push_back(w);
    }
  }
  return s;
}

}  // namespace lwuq
