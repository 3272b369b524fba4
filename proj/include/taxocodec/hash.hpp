/* Copyright 2026 The taxocodec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TAXOCODEC_HASH_HPP_
#define TAXOCODEC_HASH_HPP_

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace txc {

// FNV-1a. Used for content hashes (codebook, checkpoints, datasets) and for
// the parameter-group hashes that prove stage separation during training.
inline uint32_t fnv1a32(const void* bytes, size_t n, uint32_t h = 0x811c9dc5u) {
  const unsigned char* p = static_cast<const unsigned char*>(bytes);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x01000193u;
  }
  return h;
}

inline uint64_t fnv1a64(const void* bytes, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(bytes);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
uint64_t fnv1a64_values(const std::vector<T>& v, uint64_t h = 0xcbf29ce484222325ULL) {
  static_assert(std::is_trivially_copyable_v<T>);
  return v.empty() ? h : fnv1a64(v.data(), v.size() * sizeof(T), h);
}

inline std::string hash_hex(uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace txc

#endif  // TAXOCODEC_HASH_HPP_
