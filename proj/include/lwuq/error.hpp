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

#include <stdexcept>
#include <string>
#include <string_view>

namespace lwuq {

enum class ErrorCode {
  // Data model validation.
  DimensionMismatch,
  NonFiniteValue,
  LabelOutOfRange,
  MissingPredictionFields,
  InvalidHeader,
  KindMismatch,
  EmptyTensor,
  // Repository and queries.
  EmptyRepository,
  DuplicateSampleId,
  KTooLarge,
  LayerOutOfRange,
  EmptyRow,
  // File format.
  Io,
  BadMagic,
  UnsupportedVersion,
  TruncatedFile,
  ChecksumMismatch,
  // Meta-classifier and evaluation.
  SingleClassTarget,
  EmptyFeatures,
  NonFiniteFeature,
  SingleClass,
  NoPositives,
  TooFewSamples,
  // Experiment and configuration.
  InvalidSpec,
  InvalidConfig,
};

std::string_view error_name(ErrorCode code) noexcept;

// True for failures that stem from reading or writing files, as opposed to
// malformed content.
bool is_io_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace lwuq
