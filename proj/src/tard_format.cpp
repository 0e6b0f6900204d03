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

#include "lwuq/tard_format.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "lwuq/error.hpp"

namespace lwuq::tard {

namespace {

constexpr std::size_t kFixedHeaderBytes = 4 + 1 + 1 + 3 * 4;
constexpr std::size_t kRecordBytes = 4 + 2 + 2 + 4;

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return in_[pos_++]; }
  std::uint16_t u16() {
    const auto v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int s = 0; s < 32; s += 8) v |= static_cast<std::uint32_t>(in_[pos_++]) << s;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed large buffers in chunks.
  constexpr std::size_t kChunk = std::size_t{1} << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t len = std::min(kChunk, bytes.size() - off);
    crc = crc32(crc, bytes.data() + off, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::InvalidHeader, std::string(what) + " does not fit in u32");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> encode(const Contents& contents) {
  const DatasetHeader& h = contents.header;
  if (contents.records.size() != h.num_samples || contents.layers.size() != h.num_layers ||
      h.layer_specs.size() != h.num_layers) {
    fail(ErrorCode::InvalidHeader, "contents disagree with header sizes");
  }
  std::size_t total = kFixedHeaderBytes + 4 * h.num_layers + kRecordBytes * h.num_samples + 4;
  for (std::size_t l = 0; l < h.num_layers; ++l) {
    if (contents.layers[l].size() != h.num_samples * h.dim(l)) {
      fail(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " matrix has wrong size");
    }
    total += 4 * contents.layers[l].size();
  }

  std::vector<std::uint8_t> out;
  out.reserve(total);
  Writer w(out);
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(h.kind));
  w.u32(checked_u32(h.num_layers, "L"));
  w.u32(checked_u32(h.num_samples, "N"));
  w.u32(checked_u32(h.num_classes, "C"));
  for (const auto& spec : h.layer_specs) w.u32(checked_u32(spec.dim, "dim"));
  for (const auto& rec : contents.records) {
    w.u32(rec.sample_id);
    w.u16(rec.true_label);
    w.u16(rec.predicted_label.value_or(kAbsentLabel));
    w.f32(rec.softmax_confidence.value_or(std::numeric_limits<float>::quiet_NaN()));
  }
  for (const auto& layer : contents.layers) {
    for (float v : layer) w.f32(v);
  }
  w.u32(checksum(out));
  return out;
}

Contents decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorCode::BadMagic, "file does not start with \"TARD\"");
  }
  if (bytes.size() < kFixedHeaderBytes) {
    fail(ErrorCode::TruncatedFile, "file is shorter than the fixed header");
  }
  Reader r(bytes);
  r.u32();  // magic
  const std::uint8_t version = r.u8();
  if (version != kVersion) {
    fail(ErrorCode::UnsupportedVersion, "version " + std::to_string(version) + " (supported: 1)");
  }
  const std::uint8_t kind = r.u8();
  if (kind > 1) fail(ErrorCode::InvalidHeader, "unknown kind byte " + std::to_string(kind));

  Contents out;
  DatasetHeader& h = out.header;
  h.kind = static_cast<DatasetKind>(kind);
  h.num_layers = r.u32();
  h.num_samples = r.u32();
  h.num_classes = r.u32();

  // Sizes in 64-bit so that a corrupt header cannot overflow the arithmetic.
  std::uint64_t needed = kFixedHeaderBytes + std::uint64_t{4} * h.num_layers;
  if (bytes.size() < needed) fail(ErrorCode::TruncatedFile, "file ends inside the layer dims");
  std::vector<std::size_t> dims(h.num_layers);
  std::uint64_t values_per_sample = 0;
  for (auto& d : dims) {
    d = r.u32();
    values_per_sample += d;
  }
  needed += std::uint64_t{kRecordBytes} * h.num_samples +
            std::uint64_t{4} * values_per_sample * h.num_samples + 4;
  if (bytes.size() < needed) {
    fail(ErrorCode::TruncatedFile, "file has " + std::to_string(bytes.size()) +
                                       " bytes, header implies " + std::to_string(needed));
  }
  if (bytes.size() > needed) {
    fail(ErrorCode::InvalidHeader, "file has " + std::to_string(bytes.size() - needed) +
                                       " unexpected trailing bytes");
  }
  const std::size_t body = bytes.size() - 4;
  Reader crc_reader(bytes.subspan(body));
  const std::uint32_t stored = crc_reader.u32();
  const std::uint32_t actual = checksum(bytes.first(body));
  if (stored != actual) fail(ErrorCode::ChecksumMismatch, "stored CRC32 does not match contents");

  h.layer_specs = make_layer_specs(dims);
  h.validate();

  out.records.resize(h.num_samples);
  for (auto& rec : out.records) {
    rec.sample_id = r.u32();
    rec.true_label = r.u16();
    const std::uint16_t predicted = r.u16();
    const float confidence = r.f32();
    if (predicted != kAbsentLabel) rec.predicted_label = predicted;
    if (!std::isnan(confidence)) rec.softmax_confidence = confidence;
  }
  out.layers.resize(h.num_layers);
  for (std::size_t l = 0; l < h.num_layers; ++l) {
    auto& layer = out.layers[l];
    layer.resize(h.num_samples * dims[l]);
    for (auto& v : layer) v = r.f32();
  }
  return out;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  if (size < 0) fail(ErrorCode::Io, "cannot determine size of '" + path.string() + "'");
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    fail(ErrorCode::Io, "failed reading '" + path.string() + "'");
  }
  return bytes;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::Io, "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::Io, "cannot rename into '" + path.string() + "': " + ec.message());
}

Contents to_contents(const Dataset& dataset) {
  const DatasetHeader& h = dataset.header;
  Contents out;
  out.header = h;
  out.records.reserve(dataset.traces.size());
  for (const auto& t : dataset.traces) {
    out.records.push_back({t.sample_id, t.true_label, t.predicted_label, t.softmax_confidence});
  }
  out.layers.resize(h.num_layers);
  for (std::size_t l = 0; l < h.num_layers; ++l) {
    auto& layer = out.layers[l];
    layer.reserve(dataset.traces.size() * h.dim(l));
    for (const auto& t : dataset.traces) {
      if (l >= t.activations.size() || t.activations[l].size() != h.dim(l)) {
        fail(ErrorCode::DimensionMismatch, "sample_id " + std::to_string(t.sample_id) +
                                               " layer " + std::to_string(l) +
                                               " does not match header dim");
      }
      layer.insert(layer.end(), t.activations[l].begin(), t.activations[l].end());
    }
  }
  return out;
}

Dataset to_dataset(const Contents& contents) {
  const DatasetHeader& h = contents.header;
  Dataset out;
  out.header = h;
  out.traces.resize(h.num_samples);
  for (std::size_t i = 0; i < h.num_samples; ++i) {
    auto& t = out.traces[i];
    const auto& rec = contents.records[i];
    t.sample_id = rec.sample_id;
    t.true_label = rec.true_label;
    t.predicted_label = rec.predicted_label;
    t.softmax_confidence = rec.softmax_confidence;
    t.activations.resize(h.num_layers);
    for (std::size_t l = 0; l < h.num_layers; ++l) {
      const std::size_t dim = h.dim(l);
      const auto begin = contents.layers[l].begin() + static_cast<std::ptrdiff_t>(i * dim);
      t.activations[l].assign(begin, begin + static_cast<std::ptrdiff_t>(dim));
    }
  }
  return out;
}

Dataset read_dataset(const std::filesystem::path& path) {
  Dataset dataset = to_dataset(decode(read_bytes(path)));
  validate_dataset(dataset);
  return dataset;
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  validate_dataset(dataset);
  const auto bytes = encode(to_contents(dataset));
  write_bytes(path, bytes);
}

}  // namespace lwuq::tard
