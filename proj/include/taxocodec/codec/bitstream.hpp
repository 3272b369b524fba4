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

#ifndef TAXOCODEC_CODEC_BITSTREAM_HPP_
#define TAXOCODEC_CODEC_BITSTREAM_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace txc::codec {

inline constexpr char kBitstreamMagic[4] = {'T', 'X', 'C', '1'};
inline constexpr size_t kHeaderBytes = 4 + 1 + 3 * 2 + 2 + 2 * 2 + 4 + 4 + 4 + 4;

// Self-describing container: header, coded hyper vector segment, coded latent
// segment. All integers little-endian; layout is bit-exact across platforms.
struct BitstreamHeader {
  uint8_t version = 1;
  uint16_t latent_c = 0, latent_h = 0, latent_w = 0;
  uint16_t hyper_j = 0;
  int16_t alphabet_min = 0, alphabet_max = 0;
  uint32_t codebook_hash = 0;
  uint32_t v_symbol_count = 0;
  uint32_t v_byte_len = 0;
  uint32_t z_byte_len = 0;

  bool operator==(const BitstreamHeader&) const = default;
};

struct Bitstream {
  BitstreamHeader header;
  std::vector<uint8_t> v_bytes;
  std::vector<uint8_t> z_bytes;

  int64_t total_bits() const {
    return 8 * static_cast<int64_t>(kHeaderBytes + v_bytes.size() + z_bytes.size());
  }
  // Coded payload only; the quantity the entropy model estimates.
  int64_t payload_bits() const { return 8 * static_cast<int64_t>(v_bytes.size() + z_bytes.size()); }
};

std::vector<uint8_t> emit_header(const BitstreamHeader& header);
BitstreamHeader parse_header(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> emit_bitstream(const Bitstream& bs);
Bitstream parse_bitstream(const std::vector<uint8_t>& bytes);

void save_bitstream(const std::string& path, const Bitstream& bs);
Bitstream load_bitstream(const std::string& path);

}  // namespace txc::codec

#endif  // TAXOCODEC_CODEC_BITSTREAM_HPP_
