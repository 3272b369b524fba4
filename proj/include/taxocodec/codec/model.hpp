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

#ifndef TAXOCODEC_CODEC_MODEL_HPP_
#define TAXOCODEC_CODEC_MODEL_HPP_

#include <string>
#include <utility>

#include "taxocodec/codec/config.hpp"
#include "taxocodec/entropy/hyper.hpp"
#include "taxocodec/entropy/rate.hpp"

namespace txc::codec {

// Analysis transform E: two stride-2 convolutions into the latent space.
template <typename T>
struct AnalysisEncoder {
  nn::Conv2dLayer<T> c0, c1;

  AnalysisEncoder() = default;
  AnalysisEncoder(int in_ch, int hidden, int latent_ch, Rng& rng)
      : c0(in_ch, hidden, 3, 2, 1, rng), c1(hidden, latent_ch, 3, 2, 1, rng) {}

  nn::TensorPtr<T> forward(const nn::TensorPtr<T>& x) const { return c1.forward(nn::relu(c0.forward(x))); }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) {
    c0.collect(set, prefix + ".c0");
    c1.collect(set, prefix + ".c1");
  }
};

// Synthesis transform D: mirrors E with resize + convolution stages.
template <typename T>
struct SynthesisDecoder {
  nn::Conv2dLayer<T> c0, c1;
  int out_h = 0, out_w = 0;

  SynthesisDecoder() = default;
  SynthesisDecoder(int latent_ch, int hidden, int out_ch, int out_h_, int out_w_, Rng& rng)
      : c0(latent_ch, hidden, 3, 1, 1, rng), c1(hidden, out_ch, 3, 1, 1, rng), out_h(out_h_), out_w(out_w_) {}

  nn::TensorPtr<T> forward(const nn::TensorPtr<T>& z) const {
    auto x = nn::bilinear_resize(z, out_h / 2, out_w / 2);
    x = nn::relu(c0.forward(x));
    x = nn::bilinear_resize(x, out_h, out_w);
    return c1.forward(x);
  }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) {
    c0.collect(set, prefix + ".c0");
    c1.collect(set, prefix + ".c1");
  }
};

// Hyper analysis transform f_Ha followed by the global pooling that removes
// the spatial dimensions, producing the J-dimensional hyper vector.
template <typename T>
struct HyperAnalysis {
  nn::Conv2dLayer<T> c0, c1;

  HyperAnalysis() = default;
  HyperAnalysis(int latent_ch, int hidden, int j, Rng& rng)
      : c0(latent_ch, hidden, 3, 1, 1, rng), c1(hidden, j, 1, 1, 0, rng) {}

  nn::TensorPtr<T> forward(const nn::TensorPtr<T>& z) const {
    return nn::global_mean_pool(c1.forward(nn::relu(c0.forward(z))));
  }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) {
    c0.collect(set, prefix + ".c0");
    c1.collect(set, prefix + ".c1");
  }
};

// The full codebook-hyperprior compression model: transforms, codebook,
// conditional-parameter path and the hyper-scale priors.
template <typename T>
struct CodecModel {
  CodecConfig cfg;
  entropy::Alphabet alphabet;
  AnalysisEncoder<T> encoder;
  SynthesisDecoder<T> decoder;
  HyperAnalysis<T> hyper;
  entropy::CoefficientDecoder<T> coeff;
  entropy::PredictionHead<T> head;
  entropy::Codebook<T> codebook;
  entropy::HyperScales<T> hyper_scales;

  CodecModel() = default;
  CodecModel(const CodecConfig& cfg_, Rng& rng)
      : cfg(cfg_),
        alphabet(cfg_.alphabet_min, cfg_.alphabet_max),
        encoder(cfg_.input_channels, cfg_.enc_hidden, cfg_.latent_channels, rng),
        decoder(cfg_.latent_channels, cfg_.dec_hidden, cfg_.input_channels, cfg_.input_h, cfg_.input_w, rng),
        hyper(cfg_.latent_channels, cfg_.hyper_hidden, cfg_.hyper_j, rng),
        coeff(cfg_.hyper_j, cfg_.prior_n, cfg_.tau, rng),
        head(cfg_.prior_n, cfg_.head_hidden, cfg_.latent_channels, rng),
        codebook(cfg_.tau, cfg_.codebook_s, cfg_.prior_n, rng),
        hyper_scales(cfg_.hyper_j) {
    cfg.validate();
  }

  // Conditional-parameter derivation q(z|v): decode coefficients, synthesize
  // the spatial prior from the codebook, predict (mu, sigma). Both compress
  // and decompress call this single path with the decoded integer v, which is
  // what makes the decoder mirror the encoder bit for bit.
  std::pair<nn::TensorPtr<T>, nn::TensorPtr<T>> conditionals_from_v(const nn::TensorPtr<T>& v_real, int target_h,
                                                                    int target_w) const {
    auto coeffs = coeff.forward(v_real);
    auto prior = entropy::synthesize_prior(coeffs, codebook, target_h, target_w);
    return head.forward(prior);
  }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) {
    encoder.collect(set, prefix + ".enc");
    decoder.collect(set, prefix + ".dec");
    hyper.collect(set, prefix + ".hyper");
    coeff.collect(set, prefix + ".coeff");
    head.collect(set, prefix + ".head");
    codebook.collect(set, prefix + ".codebook");
    hyper_scales.collect(set, prefix + ".hyper_scales");
  }

  void set_trainable(bool t) {
    nn::ParamSet<T> set;
    collect(set, "codec");
    for (auto* p : set.params()) p->set_trainable(t);
  }
};

}  // namespace txc::codec

#endif  // TAXOCODEC_CODEC_MODEL_HPP_
