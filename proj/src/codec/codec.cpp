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

#include "taxocodec/codec/codec.hpp"

#include "taxocodec/coder/range_coder.hpp"
#include "taxocodec/version.hpp"

namespace txc::codec {

namespace {

void check_finite(const nn::TensorPtr<float>& t, int stage_index, const char* stage_name) {
  if (!t->all_finite()) {
    fail("NON_FINITE", "stage " + std::to_string(stage_index) + " (" + stage_name + ") produced non-finite values");
  }
}

nn::TensorPtr<float> tensor_from_symbols(const std::vector<int32_t>& symbols, nn::Shape shape) {
  std::vector<float> data(symbols.size());
  for (size_t i = 0; i < symbols.size(); ++i) data[i] = static_cast<float>(symbols[i]);
  return nn::make_tensor<float>(std::move(shape), std::move(data));
}

std::vector<float> eval_hyper_sigmas(const CodecModel<float>& model) {
  return model.hyper_scales.sigma()->data;
}

std::vector<coder::CdfTable> hyper_tables(const std::vector<float>& sigmas, const entropy::Alphabet& a) {
  std::vector<coder::CdfTable> tables;
  tables.reserve(sigmas.size());
  for (float s : sigmas) {
    tables.push_back(
        coder::build_cdf(entropy::pmf_to_float(entropy::discretized_gaussian_pmf(0.0, s, a)), a.size()));
  }
  return tables;
}

// (mu, sigma) from the decoded integer hyper vector through the pinned
// evaluation path shared by compress and decompress.
entropy::GaussianParams conditionals_from_symbols(const CodecModel<float>& model, const std::vector<int32_t>& v_syms) {
  auto v_real = tensor_from_symbols(v_syms, {1, model.cfg.hyper_j});
  auto [mu, sigma] = model.conditionals_from_v(v_real, model.cfg.latent_h(), model.cfg.latent_w());
  entropy::GaussianParams params;
  params.mu = mu->data;
  params.sigma = sigma->data;
  params.shape = {model.cfg.latent_channels, model.cfg.latent_h(), model.cfg.latent_w()};
  return params;
}

std::vector<coder::CdfTable> latent_tables(const entropy::GaussianParams& params, const entropy::Alphabet& a) {
  std::vector<coder::CdfTable> tables;
  tables.reserve(params.mu.size());
  for (size_t k = 0; k < params.mu.size(); ++k) {
    tables.push_back(coder::build_cdf(
        entropy::pmf_to_float(entropy::discretized_gaussian_pmf(params.mu[k], params.sigma[k], a)), a.size()));
  }
  return tables;
}

coder::CodedSegment encode_with_tables(const std::vector<int32_t>& symbols, const std::vector<coder::CdfTable>& tables,
                                       const entropy::Alphabet& a) {
  std::vector<int32_t> offsets(symbols.size());
  for (size_t i = 0; i < symbols.size(); ++i) offsets[i] = a.offset(symbols[i]);
  std::vector<const coder::CdfTable*> refs(tables.size());
  for (size_t i = 0; i < tables.size(); ++i) refs[i] = &tables[i];
  return coder::encode_symbols(offsets, refs);
}

std::vector<int32_t> decode_with_tables(const coder::CodedSegment& segment,
                                        const std::vector<coder::CdfTable>& tables, const entropy::Alphabet& a) {
  std::vector<const coder::CdfTable*> refs(tables.size());
  for (size_t i = 0; i < tables.size(); ++i) refs[i] = &tables[i];
  auto offsets = coder::decode_symbols(segment, refs);
  std::vector<int32_t> symbols(offsets.size());
  for (size_t i = 0; i < offsets.size(); ++i) symbols[i] = a.symbol(offsets[i]);
  return symbols;
}

}  // namespace

CompressOutput compress(const CodecModel<float>& model, const nn::TensorPtr<float>& h) {
  const auto& cfg = model.cfg;
  require(h->shape == nn::Shape({1, cfg.input_channels, cfg.input_h, cfg.input_w}), "SHAPE_MISMATCH",
          "compress: feature " + nn::shape_str(h->shape) + " does not match model input (1x" +
              std::to_string(cfg.input_channels) + "x" + std::to_string(cfg.input_h) + "x" +
              std::to_string(cfg.input_w) + ")");
  check_finite(h, 0, "input feature");

  auto y = model.encoder.forward(h);
  check_finite(y, 1, "analysis encoder");

  CompressOutput out;
  out.z.symbols = entropy::quantize_eval(y->data, model.alphabet);
  out.z.shape = {cfg.latent_channels, cfg.latent_h(), cfg.latent_w()};
  out.z.alphabet = model.alphabet;

  auto v_pre = model.hyper.forward(tensor_from_symbols(out.z.symbols, {1, cfg.latent_channels, cfg.latent_h(), cfg.latent_w()}));
  check_finite(v_pre, 2, "hyper analysis");
  out.v.symbols = entropy::quantize_eval(v_pre->data, model.alphabet);
  out.v.alphabet = model.alphabet;
  out.v.scales = eval_hyper_sigmas(model);

  const auto v_tables = hyper_tables(out.v.scales, model.alphabet);
  const auto v_segment = encode_with_tables(out.v.symbols, v_tables, model.alphabet);

  out.params = conditionals_from_symbols(model, out.v.symbols);
  const auto z_tables = latent_tables(out.params, model.alphabet);
  const auto z_segment = encode_with_tables(out.z.symbols, z_tables, model.alphabet);

  Bitstream bs;
  bs.header.version = static_cast<uint8_t>(kBitstreamVersion);
  bs.header.latent_c = static_cast<uint16_t>(cfg.latent_channels);
  bs.header.latent_h = static_cast<uint16_t>(cfg.latent_h());
  bs.header.latent_w = static_cast<uint16_t>(cfg.latent_w());
  bs.header.hyper_j = static_cast<uint16_t>(cfg.hyper_j);
  bs.header.alphabet_min = static_cast<int16_t>(model.alphabet.t_min);
  bs.header.alphabet_max = static_cast<int16_t>(model.alphabet.t_max);
  bs.header.codebook_hash = model.codebook.content_hash();
  bs.header.v_symbol_count = static_cast<uint32_t>(out.v.symbols.size());
  bs.header.v_byte_len = static_cast<uint32_t>(v_segment.bytes.size());
  bs.header.z_byte_len = static_cast<uint32_t>(z_segment.bytes.size());
  bs.v_bytes = v_segment.bytes;
  bs.z_bytes = z_segment.bytes;

  out.record.bits_estimated = entropy::rate_bits_eval(out.z, out.v, out.params);
  out.record.bits_actual = bs.payload_bits();
  out.record.bpp = static_cast<double>(bs.total_bits()) / (static_cast<double>(cfg.source_h) * cfg.source_w);
  out.bitstream = std::move(bs);
  return out;
}

DecodedSymbols decompress_symbols(const CodecModel<float>& model, const Bitstream& bs) {
  const auto& cfg = model.cfg;
  const auto& h = bs.header;
  require(h.version == kBitstreamVersion, "UNSUPPORTED_VERSION",
          "bitstream version " + std::to_string(h.version) + ", supported " + std::to_string(kBitstreamVersion));
  require(h.codebook_hash == model.codebook.content_hash(), "HASH_MISMATCH",
          "bitstream was produced by a model with a different codebook");
  require(h.latent_c == cfg.latent_channels && h.latent_h == cfg.latent_h() && h.latent_w == cfg.latent_w() &&
              h.hyper_j == cfg.hyper_j,
          "SHAPE_MISMATCH", "bitstream latent dimensions do not match the model configuration");
  require(h.alphabet_min == model.alphabet.t_min && h.alphabet_max == model.alphabet.t_max, "SHAPE_MISMATCH",
          "bitstream alphabet does not match the model");
  require(h.v_symbol_count == static_cast<uint32_t>(cfg.hyper_j), "BAD_BITSTREAM",
          "hyper segment symbol count disagrees with J");

  DecodedSymbols out;
  out.v.alphabet = model.alphabet;
  out.v.scales = eval_hyper_sigmas(model);
  const auto v_tables = hyper_tables(out.v.scales, model.alphabet);
  coder::CodedSegment v_segment{bs.v_bytes, h.v_symbol_count};
  out.v.symbols = decode_with_tables(v_segment, v_tables, model.alphabet);

  out.params = conditionals_from_symbols(model, out.v.symbols);
  const auto z_tables = latent_tables(out.params, model.alphabet);
  coder::CodedSegment z_segment{bs.z_bytes, static_cast<uint32_t>(cfg.latent_size())};
  out.z.symbols = decode_with_tables(z_segment, z_tables, model.alphabet);
  out.z.shape = {cfg.latent_channels, cfg.latent_h(), cfg.latent_w()};
  out.z.alphabet = model.alphabet;
  return out;
}

nn::TensorPtr<float> synthesize_features(const CodecModel<float>& model, const entropy::QuantizedLatent& z) {
  const auto& cfg = model.cfg;
  auto z_real = tensor_from_symbols(z.symbols, {1, cfg.latent_channels, cfg.latent_h(), cfg.latent_w()});
  return model.decoder.forward(z_real);
}

nn::TensorPtr<float> decompress(const CodecModel<float>& model, const Bitstream& bs) {
  return synthesize_features(model, decompress_symbols(model, bs).z);
}

}  // namespace txc::codec
