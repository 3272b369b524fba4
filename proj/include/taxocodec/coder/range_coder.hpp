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

#ifndef TAXOCODEC_CODER_RANGE_CODER_HPP_
#define TAXOCODEC_CODER_RANGE_CODER_HPP_

#include <cstdint>
#include <vector>

#include "taxocodec/coder/cdf.hpp"

// Carry-less range coder with a 64-bit state, 16-bit probability precision
// and byte-wise renormalization. Pure integer arithmetic throughout, so
// identical inputs produce bitwise-identical streams on any platform.
namespace txc::coder {

class RangeEncoder {
 public:
  void encode(uint32_t cum_lo, uint32_t freq);

  // Seals the stream with a two-byte tail: the final codeword is rounded up
  // to a multiple of 2^48 so its low six bytes are implicit zeros that the
  // decoder reads virtually.
  std::vector<uint8_t> finish();

 private:
  static constexpr uint64_t kTop = 1ull << 56;
  static constexpr uint64_t kBottom = 1ull << 48;

  uint64_t low_ = 0;
  uint64_t range_ = ~0ull;
  std::vector<uint8_t> out_;
};

class RangeDecoder {
 public:
  RangeDecoder(const uint8_t* bytes, size_t len);

  // Returns the cumulative-count slot of the next symbol in [0, 2^16).
  uint32_t decode_cum();
  void consume(uint32_t cum_lo, uint32_t freq);

  // True once every real byte has been consumed; a successful decode of a
  // well-formed stream always ends in this state.
  bool fully_consumed() const { return pos_ >= len_; }

 private:
  static constexpr uint64_t kTop = 1ull << 56;
  static constexpr uint64_t kBottom = 1ull << 48;
  static constexpr int kMaxVirtualReads = 6;  // 8-byte window minus the 2-byte tail

  uint8_t next_byte();

  const uint8_t* bytes_;
  size_t len_;
  size_t pos_ = 0;
  int virtual_reads_ = 0;
  uint64_t low_ = 0;
  uint64_t range_ = ~0ull;
  uint64_t code_ = 0;
};

struct CodedSegment {
  std::vector<uint8_t> bytes;
  uint32_t symbol_count = 0;
};

// Symbols are zero-based indices into their position's table. One table per
// position; entries may repeat (and usually do).
CodedSegment encode_symbols(const std::vector<int32_t>& symbols, const std::vector<const CdfTable*>& cdfs);

// Exact inverse of encode_symbols given identical tables. Truncated or
// corrupt segments raise an error rather than returning garbage symbols.
std::vector<int32_t> decode_symbols(const CodedSegment& segment, const std::vector<const CdfTable*>& cdfs);

}  // namespace txc::coder

#endif  // TAXOCODEC_CODER_RANGE_CODER_HPP_
