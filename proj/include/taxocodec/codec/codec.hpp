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

#ifndef TAXOCODEC_CODEC_CODEC_HPP_
#define TAXOCODEC_CODEC_CODEC_HPP_

#include "taxocodec/codec/bitstream.hpp"
#include "taxocodec/codec/model.hpp"

namespace txc::codec {

// Rate-distortion bookkeeping for one coded item. bits_actual counts the
// coded payload (what the entropy model estimates); bpp is charged on the
// whole container at the source resolution.
struct RDRecord {
  double bits_estimated = 0.0;
  int64_t bits_actual = 0;
  double bpp = 0.0;
  std::vector<double> distortions;
};

struct CompressOutput {
  Bitstream bitstream;
  entropy::QuantizedLatent z;
  entropy::HyperVector v;
  entropy::GaussianParams params;
  RDRecord record;
};

struct DecodedSymbols {
  entropy::QuantizedLatent z;
  entropy::HyperVector v;
  entropy::GaussianParams params;
};

// Full encoding pass over one feature tensor h of shape (1, C, H, W):
// z = quantize(E(h)); v = quantize(pool(f_Ha(z))); v is coded under its
// zero-mean tables, then z under tables derived from the decoded-equivalent v.
CompressOutput compress(const CodecModel<float>& model, const nn::TensorPtr<float>& h);

// Decodes v, mirrors the conditional-parameter derivation bit for bit,
// decodes z and returns D(z) of shape (1, C, H, W). Deterministic.
nn::TensorPtr<float> decompress(const CodecModel<float>& model, const Bitstream& bs);

// Decode stopping at the integer symbols; used to verify losslessness and to
// share one entropy-decode pass across consumers.
DecodedSymbols decompress_symbols(const CodecModel<float>& model, const Bitstream& bs);

// Synthesis only: D applied to decoded symbols.
nn::TensorPtr<float> synthesize_features(const CodecModel<float>& model, const entropy::QuantizedLatent& z);

}  // namespace txc::codec

#endif  // TAXOCODEC_CODEC_CODEC_HPP_
