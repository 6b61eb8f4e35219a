//
// Copyright 2026 The PCEvolve Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "pcevolve/embedder.h"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace pcevolve {
namespace {

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool ParseNumber(std::string_view text, T& out) {
  text = Trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

template <typename T>
void PutLe(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little ||
                std::endian::native == std::endian::big);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
bool GetLe(std::istream& in, T& value) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) return false;
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  std::memcpy(&value, bytes.data(), sizeof(T));
  return true;
}

}  // namespace

EmbeddingSource EmbeddingSource::File(std::string path, Format format,
                                      std::size_t dimension) {
  EmbeddingSource s;
  s.kind = Kind::kFile;
  s.path = std::move(path);
  s.format = format;
  s.dimension = dimension;
  return s;
}

EmbeddingFormatError::EmbeddingFormatError(long long record,
                                           const std::string& what)
    : std::runtime_error(record < 0 ? what
                                    : "record " + std::to_string(record) +
                                          ": " + what),
      record_(record) {}

Dataset EmbedDataset(const EmbeddingSource& source, const Dataset& raw) {
  if (source.kind != EmbeddingSource::Kind::kIdentity) {
    throw std::invalid_argument("file embedding source takes no raw dataset");
  }
  if (source.dimension != 0 && source.dimension != raw.dimension()) {
    throw DimensionMismatchError(source.dimension, raw.dimension());
  }
  return raw;
}

Dataset EmbedDataset(const EmbeddingSource& source, int class_count) {
  if (source.kind != EmbeddingSource::Kind::kFile) {
    throw std::invalid_argument("identity embedding source needs a dataset");
  }
  Dataset data = ReadDatasetFile(source.path, source.format, class_count);
  if (source.dimension != 0 && source.dimension != data.dimension()) {
    throw EmbeddingFormatError(-1, "declared dimension " +
                                       std::to_string(source.dimension) +
                                       " but file has " +
                                       std::to_string(data.dimension()));
  }
  return data;
}

Dataset ReadCsv(std::istream& in, int class_count) {
  std::string line;
  if (!std::getline(in, line)) throw EmbeddingFormatError(-1, "empty CSV");
  const std::vector<std::string_view> header = SplitCommas(line);
  if (header.size() < 2 || Trim(header[0]) != "class_id") {
    throw EmbeddingFormatError(-1, "CSV header must start with class_id");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (Trim(header[j + 1]) != "f" + std::to_string(j)) {
      throw EmbeddingFormatError(-1, "CSV header column " +
                                         std::to_string(j + 1) +
                                         " must be f" + std::to_string(j));
    }
  }
  Dataset data(class_count, d);
  long long record = 0;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    const std::vector<std::string_view> cells = SplitCommas(line);
    if (cells.size() != d + 1) {
      throw EmbeddingFormatError(record, "expected " + std::to_string(d + 1) +
                                             " fields, got " +
                                             std::to_string(cells.size()));
    }
    long long class_id = 0;
    if (!ParseNumber(cells[0], class_id)) {
      throw EmbeddingFormatError(record, "bad class_id");
    }
    if (class_id < 0 || class_id >= class_count) {
      throw EmbeddingFormatError(record, "class_id " +
                                             std::to_string(class_id) +
                                             " outside [0, " +
                                             std::to_string(class_count) + ")");
    }
    std::vector<double> values(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (!ParseNumber(cells[j + 1], values[j]) ||
          !std::isfinite(values[j])) {
        throw EmbeddingFormatError(record, "bad value in column f" +
                                               std::to_string(j));
      }
    }
    data.Add(FeatureVector(std::move(values)), static_cast<int>(class_id));
    ++record;
  }
  return data;
}

void WriteCsv(std::ostream& out, const Dataset& data) {
  out << "class_id";
  for (std::size_t j = 0; j < data.dimension(); ++j) out << ",f" << j;
  out << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const LabeledPoint& p : data.points()) {
    out << p.class_id;
    for (double v : p.features.values()) out << ',' << v;
    out << '\n';
  }
}

Dataset ReadBinary(std::istream& in, int class_count) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kBinaryMagic, 4) != 0) {
    throw EmbeddingFormatError(-1, "missing PCEV magic");
  }
  std::uint32_t version = 0, d = 0;
  std::uint64_t n = 0;
  if (!GetLe(in, version) || !GetLe(in, d) || !GetLe(in, n)) {
    throw EmbeddingFormatError(-1, "truncated header");
  }
  if (version != kBinaryVersion) {
    throw EmbeddingFormatError(-1, "unsupported version " +
                                       std::to_string(version));
  }
  if (d == 0) throw EmbeddingFormatError(-1, "dimension 0");
  Dataset data(class_count, d);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto record = static_cast<long long>(i);
    std::uint32_t class_id = 0;
    if (!GetLe(in, class_id)) throw EmbeddingFormatError(record, "truncated");
    if (class_id >= static_cast<std::uint32_t>(class_count)) {
      throw EmbeddingFormatError(record, "class_id " +
                                             std::to_string(class_id) +
                                             " outside [0, " +
                                             std::to_string(class_count) + ")");
    }
    std::vector<double> values(d);
    for (std::uint32_t j = 0; j < d; ++j) {
      float f = 0;
      if (!GetLe(in, f)) throw EmbeddingFormatError(record, "truncated");
      if (!std::isfinite(f)) {
        throw EmbeddingFormatError(record, "non-finite value");
      }
      values[j] = f;
    }
    data.Add(FeatureVector(std::move(values)), static_cast<int>(class_id));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw EmbeddingFormatError(-1, "trailing bytes after declared records");
  }
  return data;
}

void WriteBinary(std::ostream& out, const Dataset& data) {
  out.write(kBinaryMagic, 4);
  PutLe<std::uint32_t>(out, kBinaryVersion);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(data.dimension()));
  PutLe<std::uint64_t>(out, data.size());
  for (const LabeledPoint& p : data.points()) {
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(p.class_id));
    for (double v : p.features.values()) {
      PutLe<float>(out, static_cast<float>(v));
    }
  }
}

Dataset ReadDatasetFile(const std::string& path,
                        EmbeddingSource::Format format, int class_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EmbeddingFormatError(-1, "cannot open " + path);
  return format == EmbeddingSource::Format::kCsv ? ReadCsv(in, class_count)
                                                 : ReadBinary(in, class_count);
}

void WriteDatasetFile(const std::string& path, EmbeddingSource::Format format,
                      const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (format == EmbeddingSource::Format::kCsv) {
    WriteCsv(out, data);
  } else {
    WriteBinary(out, data);
  }
}

EmbeddingSource::Format FormatForPath(const std::string& path) {
  const std::string_view p(path);
  return p.size() >= 4 && p.substr(p.size() - 4) == ".csv"
             ? EmbeddingSource::Format::kCsv
             : EmbeddingSource::Format::kBinary;
}

}  // namespace pcevolve
