// Copyright 2026 The rdlearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RDL_DATASET_HPP
#define RDL_DATASET_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rdl/bits.hpp"

namespace rdl {

struct DatasetMeta {
  std::string model_hash;   // content_hash of the model's canonical text, may be empty
  std::string config_json;  // generating configuration, echoed verbatim
  std::string split;        // "train", "val", "samples", ...
};

// Ordered collection of visible configurations of one fixed length.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t nx) : nx_(nx) {}
  Dataset(std::size_t nx, std::vector<BitConfig> samples);

  std::size_t nx() const { return nx_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  void push_back(BitConfig x);
  const BitConfig& operator[](std::size_t i) const { return samples_[i]; }
  std::span<const BitConfig> samples() const { return samples_; }
  std::vector<BitConfig>& mutable_samples() { return samples_; }

  DatasetMeta meta;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.nx_ == b.nx_ && a.samples_ == b.samples_;
  }

 private:
  std::size_t nx_ = 0;
  std::vector<BitConfig> samples_;
};

// Binary dataset file (.rdd), little-endian:
//   bytes 0..7      magic "RDLDATA1"
//   u32             format version (1)
//   u32             Nx
//   u64             sample count
//   char[40]        model hash, lowercase hex, zero-filled when absent
//   u32             byte length L of the configuration echo
//   char[L]         configuration echo (UTF-8 JSON)
//   u32             byte length S of the split label
//   char[S]         split label
//   rows            count rows of ceil(Nx/8) bytes; unit i is bit (i % 8),
//                   least significant first, of byte i / 8; padding bits 0
void write_dataset(std::ostream& out, const Dataset& ds);
Dataset read_dataset(std::istream& in);

// Writes `path` plus a JSON sidecar at `path` + ".json" holding the header
// fields and the content hash of the binary file.
void save_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace rdl

#endif  // RDL_DATASET_HPP
