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

#include "taxocodec/codec/bitstream.hpp"

#include <cstring>
#include <fstream>

#include "taxocodec/error.hpp"

namespace txc::codec {

namespace {

void put_u8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_i16(std::vector<uint8_t>& out, int16_t v) { put_u16(out, static_cast<uint16_t>(v)); }

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

struct Reader {
  const std::vector<uint8_t>& bytes;
  size_t pos = 0;

  uint8_t u8() {
    require(pos + 1 <= bytes.size(), "BAD_BITSTREAM", "bitstream header truncated");
    return bytes[pos++];
  }
  uint16_t u16() {
    uint16_t v = u8();
    v |= static_cast<uint16_t>(u8()) << 8;
    return v;
  }
  int16_t i16() { return static_cast<int16_t>(u16()); }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(u8()) << (8 * i);
    return v;
  }
};

}  // namespace

std::vector<uint8_t> emit_header(const BitstreamHeader& h) {
  std::vector<uint8_t> out;
  out.reserve(kHeaderBytes);
  out.insert(out.end(), kBitstreamMagic, kBitstreamMagic + 4);
  put_u8(out, h.version);
  put_u16(out, h.latent_c);
  put_u16(out, h.latent_h);
  put_u16(out, h.latent_w);
  put_u16(out, h.hyper_j);
  put_i16(out, h.alphabet_min);
  put_i16(out, h.alphabet_max);
  put_u32(out, h.codebook_hash);
  put_u32(out, h.v_symbol_count);
  put_u32(out, h.v_byte_len);
  put_u32(out, h.z_byte_len);
  require(out.size() == kHeaderBytes, "INTERNAL", "header layout drifted");
  return out;
}

BitstreamHeader parse_header(const std::vector<uint8_t>& bytes) {
  require(bytes.size() >= kHeaderBytes, "BAD_BITSTREAM",
          "bitstream too short for header: " + std::to_string(bytes.size()) + " bytes");
  require(std::memcmp(bytes.data(), kBitstreamMagic, 4) == 0, "BAD_BITSTREAM", "bad magic, not a coded feature stream");
  Reader r{bytes, 4};
  BitstreamHeader h;
  h.version = r.u8();
  h.latent_c = r.u16();
  h.latent_h = r.u16();
  h.latent_w = r.u16();
  h.hyper_j = r.u16();
  h.alphabet_min = r.i16();
  h.alphabet_max = r.i16();
  h.codebook_hash = r.u32();
  h.v_symbol_count = r.u32();
  h.v_byte_len = r.u32();
  h.z_byte_len = r.u32();
  return h;
}

std::vector<uint8_t> emit_bitstream(const Bitstream& bs) {
  require(bs.header.v_byte_len == bs.v_bytes.size() && bs.header.z_byte_len == bs.z_bytes.size(), "BAD_BITSTREAM",
          "segment lengths disagree with header");
  auto out = emit_header(bs.header);
  out.insert(out.end(), bs.v_bytes.begin(), bs.v_bytes.end());
  out.insert(out.end(), bs.z_bytes.begin(), bs.z_bytes.end());
  return out;
}

Bitstream parse_bitstream(const std::vector<uint8_t>& bytes) {
  Bitstream bs;
  bs.header = parse_header(bytes);
  const size_t expect = kHeaderBytes + bs.header.v_byte_len + bs.header.z_byte_len;
  require(bytes.size() == expect, "BAD_BITSTREAM", "container length " + std::to_string(bytes.size()) +
                                                       " does not match header total " + std::to_string(expect));
  auto it = bytes.begin() + static_cast<long>(kHeaderBytes);
  bs.v_bytes.assign(it, it + bs.header.v_byte_len);
  it += bs.header.v_byte_len;
  bs.z_bytes.assign(it, it + bs.header.z_byte_len);
  return bs;
}

void save_bitstream(const std::string& path, const Bitstream& bs) {
  const auto bytes = emit_bitstream(bs);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "IO_ERROR", "cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(f.good(), "IO_ERROR", "short write to " + path);
}

Bitstream load_bitstream(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  require(f.good(), "FILE_NOT_FOUND", path);
  const auto size = static_cast<size_t>(f.tellg());
  f.seekg(0);
  std::vector<uint8_t> bytes(size);
  f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  require(f.good(), "IO_ERROR", "short read from " + path);
  return parse_bitstream(bytes);
}

}  // namespace txc::codec
