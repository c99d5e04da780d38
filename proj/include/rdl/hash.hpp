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

#ifndef RDL_HASH_HPP
#define RDL_HASH_HPP

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace rdl {

// Git blob object id: SHA-1 over "blob <size>\0" followed by the bytes,
// rendered as 40 lowercase hex digits.
std::string content_hash(std::span<const unsigned char> bytes);
std::string content_hash(std::string_view bytes);
std::string file_content_hash(const std::filesystem::path& path);

}  // namespace rdl

#endif  // RDL_HASH_HPP
