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

// TARD container: the on-disk layout shared by activation repositories and
// query sets. All integers and floats are little-endian.
//
//   "TARD"            4 bytes
//   version           u8  (= 1)
//   kind              u8  (0 = repository, 1 = queryset)
//   L, N, C           u32 each
//   dims              L x u32
//   records           N x {sample_id u32, true_label u16,
//                          predicted_label u16 (0xFFFF if absent),
//                          softmax_confidence f32 (NaN if absent)}
//   activations       for each layer: N x dim f32, row-major
//   crc32             u32 over every preceding byte
//
// Layer names are not stored; readers name layers "layer_<i>".

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lwuq/core_model.hpp"

namespace lwuq::tard {

inline constexpr char kMagic[4] = {'T', 'A', 'R', 'D'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::uint16_t kAbsentLabel = 0xFFFF;

struct SampleRecord {
  SampleId sample_id = 0;
  ClassId true_label = 0;
  std::optional<ClassId> predicted_label;
  std::optional<float> softmax_confidence;
};

// Layer-major image of a TARD file.
struct Contents {
  DatasetHeader header;
  std::vector<SampleRecord> records;
  std::vector<std::vector<float>> layers;  // layers[l] is N x dim(l), row-major
};

std::vector<std::uint8_t> encode(const Contents& contents);

// Throws TruncatedFile, BadMagic, UnsupportedVersion, ChecksumMismatch or
// InvalidHeader. Does not validate activation values or labels.
Contents decode(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place.
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

Contents to_contents(const Dataset& dataset);
Dataset to_dataset(const Contents& contents);

// Reads and fully validates a dataset file.
Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);

}  // namespace lwuq::tard
