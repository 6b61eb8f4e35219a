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

#ifndef PCEVOLVE_EMBEDDER_H_
#define PCEVOLVE_EMBEDDER_H_

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "pcevolve/core.h"

namespace pcevolve {

// Feature extractor standing in for a pretrained encoder: either vectors are
// already embedded (identity) or precomputed embeddings are loaded from disk.
struct EmbeddingSource {
  enum class Kind { kIdentity, kFile };
  enum class Format { kCsv, kBinary };

  Kind kind = Kind::kIdentity;
  std::string path;
  Format format = Format::kCsv;
  // 0 accepts whatever dimension the file declares.
  std::size_t dimension = 0;

  static EmbeddingSource Identity() { return {}; }
  static EmbeddingSource File(std::string path, Format format,
                              std::size_t dimension = 0);
};

// Ingestion failure. `record()` is the 0-based record index, or -1 for
// header-level problems.
class EmbeddingFormatError : public std::runtime_error {
 public:
  EmbeddingFormatError(long long record, const std::string& what);
  long long record() const { return record_; }

 private:
  long long record_;
};

// Identity: returns `raw` unchanged (dimension checked against the source).
Dataset EmbedDataset(const EmbeddingSource& source, const Dataset& raw);
// File: loads the records at source.path with `class_count` classes.
Dataset EmbedDataset(const EmbeddingSource& source, int class_count);

// CSV with header `class_id,f0,...,f{d-1}`, one record per line.
Dataset ReadCsv(std::istream& in, int class_count);
void WriteCsv(std::ostream& out, const Dataset& data);

// Little-endian binary: "PCEV", u32 version (1), u32 d, u64 n, then n records
// of (u32 class_id, d x f32). Coordinates are narrowed to f32 on write.
inline constexpr char kBinaryMagic[4] = {'P', 'C', 'E', 'V'};
inline constexpr std::uint32_t kBinaryVersion = 1;

Dataset ReadBinary(std::istream& in, int class_count);
void WriteBinary(std::ostream& out, const Dataset& data);

Dataset ReadDatasetFile(const std::string& path,
                        EmbeddingSource::Format format, int class_count);
void WriteDatasetFile(const std::string& path, EmbeddingSource::Format format,
                      const Dataset& data);

// Format guess from the extension: ".csv" -> CSV, anything else -> binary.
EmbeddingSource::Format FormatForPath(const std::string& path);

}  // namespace pcevolve

#endif  // PCEVOLVE_EMBEDDER_H_
