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

#include "taxocodec/coder/range_coder.hpp"

#include <algorithm>

#include "taxocodec/error.hpp"

namespace txc::coder {

void RangeEncoder::encode(uint32_t cum_lo, uint32_t freq) {
  range_ /= kProbTotal;
  low_ += cum_lo * range_;
  range_ *= freq;
  while ((low_ ^ (low_ + range_)) < kTop || (range_ < kBottom && ((range_ = (0 - low_) & (kBottom - 1)), true))) {
    out_.push_back(static_cast<uint8_t>(low_ >> 56));
    low_ <<= 8;
    range_ <<= 8;
  }
}

std::vector<uint8_t> RangeEncoder::finish() {
  // Any codeword inside [low, low+range) terminates the stream; range >= 2^48
  // holds after renormalization, so a multiple of 2^48 always fits.
  const uint64_t codeword = (low_ + (kBottom - 1)) & ~(kBottom - 1);
  out_.push_back(static_cast<uint8_t>(codeword >> 56));
  out_.push_back(static_cast<uint8_t>(codeword >> 48));
  return std::move(out_);
}

RangeDecoder::RangeDecoder(const uint8_t* bytes, size_t len) : bytes_(bytes), len_(len) {
  for (int i = 0; i < 8; ++i) code_ = (code_ << 8) | next_byte();
}

uint8_t RangeDecoder::next_byte() {
  if (pos_ < len_) return bytes_[pos_++];
  ++pos_;
  ++virtual_reads_;
  require(virtual_reads_ <= kMaxVirtualReads, "TRUNCATED",
          "range decoder ran past the end of a " + std::to_string(len_) + "-byte segment");
  return 0;
}

uint32_t RangeDecoder::decode_cum() {
  range_ /= kProbTotal;
  const uint64_t cum = (code_ - low_) / range_;
  require(cum < kProbTotal, "BAD_BITSTREAM", "range decoder produced an out-of-range cumulative count");
  return static_cast<uint32_t>(cum);
}

void RangeDecoder::consume(uint32_t cum_lo, uint32_t freq) {
  low_ += cum_lo * range_;
  range_ *= freq;
  while ((low_ ^ (low_ + range_)) < kTop || (range_ < kBottom && ((range_ = (0 - low_) & (kBottom - 1)), true))) {
    code_ = (code_ << 8) | next_byte();
    low_ <<= 8;
    range_ <<= 8;
  }
}

CodedSegment encode_symbols(const std::vector<int32_t>& symbols, const std::vector<const CdfTable*>& cdfs) {
  require(symbols.size() == cdfs.size(), "SHAPE_MISMATCH",
          "encode_symbols: " + std::to_string(symbols.size()) + " symbols vs " + std::to_string(cdfs.size()) +
              " tables");
  RangeEncoder enc;
  for (size_t i = 0; i < symbols.size(); ++i) {
    const CdfTable& t = *cdfs[i];
    const int32_t s = symbols[i];
    require(s >= 0 && s < t.size(), "BAD_ARGUMENT",
            "encode_symbols: symbol index " + std::to_string(s) + " outside table of size " + std::to_string(t.size()));
    enc.encode(t.lo(s), t.freq(s));
  }
  CodedSegment segment;
  segment.bytes = enc.finish();
  segment.symbol_count = static_cast<uint32_t>(symbols.size());
  return segment;
}

std::vector<int32_t> decode_symbols(const CodedSegment& segment, const std::vector<const CdfTable*>& cdfs) {
  require(segment.symbol_count == cdfs.size(), "SHAPE_MISMATCH",
          "decode_symbols: " + std::to_string(segment.symbol_count) + " symbols vs " + std::to_string(cdfs.size()) +
              " tables");
  RangeDecoder dec(segment.bytes.data(), segment.bytes.size());
  std::vector<int32_t> out(segment.symbol_count);
  for (size_t i = 0; i < cdfs.size(); ++i) {
    const CdfTable& t = *cdfs[i];
    const uint32_t cum = dec.decode_cum();
    const auto it = std::upper_bound(t.cum.begin(), t.cum.end(), cum);
    const int32_t s = static_cast<int32_t>(it - t.cum.begin()) - 1;
    dec.consume(t.lo(s), t.freq(s));
    out[i] = s;
  }
  require(dec.fully_consumed(), "TRUNCATED", "range decoder finished with unread payload bytes");
  return out;
}

}  // namespace txc::coder
