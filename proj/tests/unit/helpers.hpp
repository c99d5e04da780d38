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

#ifndef RDL_TESTS_HELPERS_HPP
#define RDL_TESTS_HELPERS_HPP

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "rdl/bits.hpp"
#include "rdl/rbm.hpp"
#include "rdl/rng.hpp"

namespace rdl::test {

inline BitConfig random_bits(std::size_t n, Rng& rng) {
  BitConfig x(n);
  for (std::size_t i = 0; i < n; ++i) x.set(i, rng.bernoulli(0.5));
  return x;
}

inline std::vector<BitConfig> random_batch(std::size_t count, std::size_t n, Rng& rng) {
  std::vector<BitConfig> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_bits(n, rng));
  return out;
}

// Dense random parameters: W, b and c all N(0, scale^2).
inline RbmParams random_params(std::size_t nx, std::size_t nh, double scale, Rng& rng) {
  Matrix w(nx, nh);
  Vector b(nx), c(nh);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.normal(0.0, scale);
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.normal(0.0, scale);
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rng.normal(0.0, scale);
  return RbmParams(w, b, c);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("rdl-test-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace rdl::test

#endif  // RDL_TESTS_HELPERS_HPP
