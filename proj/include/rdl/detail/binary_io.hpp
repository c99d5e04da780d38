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

#ifndef RDL_DETAIL_BINARY_IO_HPP
#define RDL_DETAIL_BINARY_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "rdl/error.hpp"

namespace rdl::detail {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swapping");

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_arithmetic_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
  static_assert(std::is_arithmetic_v<T>);
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw IoError(std::string("truncated input reading ") + what);
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

inline void expect_magic(std::istream& in, const char (&magic)[9]) {
  char buf[8];
  if (!in.read(buf, 8) || std::memcmp(buf, magic, 8) != 0) {
    throw IoError(std::string("bad magic, expected ") + magic);
  }
}

}  // namespace rdl::detail

#endif  // RDL_DETAIL_BINARY_IO_HPP
