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

#include "rdl/dataset.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rdl/detail/binary_io.hpp"
#include "rdl/hash.hpp"

namespace rdl {
namespace {

constexpr char kDataMagic[9] = "RDLDATA1";
constexpr std::uint32_t kDataVersion = 1;
constexpr std::size_t kHashLen = 40;

void put_string(std::ostream& out, const std::string& s) {
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in, const char* what) {
  const auto len = detail::get<std::uint32_t>(in, what);
  std::string s(len, '\0');
  if (len && !in.read(s.data(), len)) throw IoError(std::string("truncated ") + what);
  return s;
}

}  // namespace

Dataset::Dataset(std::size_t nx, std::vector<BitConfig> samples) : nx_(nx) {
  for (const auto& s : samples) require_dims(s.size() == nx, "dataset sample length differs from Nx");
  samples_ = std::move(samples);
}

void Dataset::push_back(BitConfig x) {
  require_dims(x.size() == nx_, "dataset sample length differs from Nx");
  samples_.push_back(std::move(x));
}

void write_dataset(std::ostream& out, const Dataset& ds) {
  if (!ds.meta.model_hash.empty() && ds.meta.model_hash.size() != kHashLen) {
    throw InvalidArgument("model hash must be 40 hex digits");
  }
  out.write(kDataMagic, 8);
  detail::put<std::uint32_t>(out, kDataVersion);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(ds.nx()));
  detail::put<std::uint64_t>(out, ds.size());
  std::string hash = ds.meta.model_hash;
  hash.resize(kHashLen, '\0');
  out.write(hash.data(), kHashLen);
  put_string(out, ds.meta.config_json);
  put_string(out, ds.meta.split);

  const std::size_t row_bytes = (ds.nx() + 7) / 8;
  std::string row(row_bytes, '\0');
  for (const auto& x : ds.samples()) {
    std::fill(row.begin(), row.end(), '\0');
    for (std::size_t i = 0; i < ds.nx(); ++i)
      if (x[i]) row[i / 8] = static_cast<char>(row[i / 8] | (1U << (i % 8)));
    out.write(row.data(), static_cast<std::streamsize>(row_bytes));
  }
  if (!out) throw IoError("failed writing dataset");
}

Dataset read_dataset(std::istream& in) {
  detail::expect_magic(in, kDataMagic);
  const auto version = detail::get<std::uint32_t>(in, "version");
  if (version != kDataVersion) throw IoError("unsupported dataset version " + std::to_string(version));
  const auto nx = detail::get<std::uint32_t>(in, "Nx");
  const auto count = detail::get<std::uint64_t>(in, "count");
  std::string hash(kHashLen, '\0');
  if (!in.read(hash.data(), kHashLen)) throw IoError("truncated model hash");
  if (hash.front() == '\0') hash.clear();

  Dataset ds(nx);
  ds.meta.model_hash = hash;
  ds.meta.config_json = get_string(in, "config echo");
  ds.meta.split = get_string(in, "split label");

  const std::size_t row_bytes = (nx + 7) / 8;
  std::string row(row_bytes, '\0');
  ds.mutable_samples().reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    if (!in.read(row.data(), static_cast<std::streamsize>(row_bytes))) {
      throw IoError("truncated dataset: expected " + std::to_string(count) + " rows, got " +
                    std::to_string(k));
    }
    std::vector<std::uint8_t> bits(nx);
    for (std::size_t i = 0; i < nx; ++i)
      bits[i] = (static_cast<unsigned char>(row[i / 8]) >> (i % 8)) & 1U;
    ds.mutable_samples().emplace_back(std::move(bits));
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
  std::ostringstream buf;
  write_dataset(buf, ds);
  const std::string bytes = buf.str();
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + path.string());
  }

  nlohmann::ordered_json side;
  side["format"] = "rdl-dataset";
  side["version"] = kDataVersion;
  side["nx"] = ds.nx();
  side["count"] = ds.size();
  side["split"] = ds.meta.split;
  side["model_hash"] = ds.meta.model_hash;
  side["content_hash"] = content_hash(bytes);
  side["config"] = ds.meta.config_json.empty()
                       ? nlohmann::ordered_json(nullptr)
                       : nlohmann::ordered_json::parse(ds.meta.config_json, nullptr, false);
  std::ofstream js(path.string() + ".json", std::ios::trunc);
  if (!js) throw IoError("cannot write sidecar for " + path.string());
  js << side.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_dataset(in);
}

}  // namespace rdl
