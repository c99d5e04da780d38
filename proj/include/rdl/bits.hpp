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

#ifndef RDL_BITS_HPP
#define RDL_BITS_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "rdl/error.hpp"

namespace rdl {

// Binary layer state with one byte per unit, each 0 or 1. The tag keeps
// visible and hidden configurations from being mixed up.
template <class Tag>
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : bits_(n, 0) {}
  Bits(std::initializer_list<int> values) {
    bits_.reserve(values.size());
    for (int v : values) bits_.push_back(checked(v));
  }
  explicit Bits(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = checked(b);
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }

  std::span<const std::uint8_t> view() const noexcept { return bits_; }
  const std::vector<std::uint8_t>& raw() const noexcept { return bits_; }

  Bits complement() const {
    Bits out = *this;
    for (auto& b : out.bits_) b ^= 1;
    return out;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  // Bit i of the integer `code` becomes unit i.
  static Bits from_index(std::uint64_t code, std::size_t n) {
    Bits out(n);
    for (std::size_t i = 0; i < n; ++i) out.bits_[i] = (code >> i) & 1U;
    return out;
  }

  friend bool operator==(const Bits&, const Bits&) = default;

 private:
  template <class T>
  static std::uint8_t checked(T v) {
    if (v != 0 && v != 1) throw InvalidArgument("bit values must be 0 or 1");
    return static_cast<std::uint8_t>(v);
  }

  std::vector<std::uint8_t> bits_;
};

struct VisibleTag {};
struct HiddenTag {};

using BitConfig = Bits<VisibleTag>;
using HiddenConfig = Bits<HiddenTag>;

inline std::size_t hamming_distance(const BitConfig& a, const BitConfig& b) {
  require_dims(a.size() == b.size(), "hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

}  // namespace rdl

#endif  // RDL_BITS_HPP
