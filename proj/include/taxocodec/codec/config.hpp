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

#ifndef TAXOCODEC_CODEC_CONFIG_HPP_
#define TAXOCODEC_CODEC_CONFIG_HPP_

#include "json.hpp"
#include "taxocodec/error.hpp"

namespace txc::codec {

// Hyperparameters of one compression model. The transform depths and widths
// are configuration, not contract; defaults are sized for desk-scale runs.
struct CodecConfig {
  int input_channels = 8;  // channels of the (fused) tensor fed to the encoder
  int input_h = 16;
  int input_w = 16;
  int latent_channels = 12;
  int hyper_j = 8;           // dimensionality of the hyper vector v
  int tau = 8;               // codebook bases
  int codebook_s = 16;       // codebook reference resolution
  int prior_n = 16;          // synthesized prior channels
  int enc_hidden = 24;
  int dec_hidden = 24;
  int hyper_hidden = 16;
  int head_hidden = 24;
  int alphabet_min = -64;
  int alphabet_max = 63;
  int source_h = 64;  // bpp reference resolution
  int source_w = 64;

  // Two stride-2 stages in the analysis transform.
  int latent_h() const { return input_h / 4; }
  int latent_w() const { return input_w / 4; }
  int latent_size() const { return latent_channels * latent_h() * latent_w(); }

  void validate() const {
    require(input_channels >= 1 && input_h >= 4 && input_w >= 4, "BAD_CONFIG", "codec input shape too small");
    require(input_h % 4 == 0 && input_w % 4 == 0, "BAD_CONFIG", "codec input extent must be divisible by 4");
    require(latent_channels >= 1 && hyper_j >= 1 && tau >= 1 && codebook_s >= 2 && prior_n >= 1, "BAD_CONFIG",
            "codec configuration must be positive");
  }

  bool operator==(const CodecConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const CodecConfig& c) {
  j = nlohmann::json{{"input_channels", c.input_channels},
                     {"input_h", c.input_h},
                     {"input_w", c.input_w},
                     {"latent_channels", c.latent_channels},
                     {"hyper_j", c.hyper_j},
                     {"tau", c.tau},
                     {"codebook_s", c.codebook_s},
                     {"prior_n", c.prior_n},
                     {"enc_hidden", c.enc_hidden},
                     {"dec_hidden", c.dec_hidden},
                     {"hyper_hidden", c.hyper_hidden},
                     {"head_hidden", c.head_hidden},
                     {"alphabet_min", c.alphabet_min},
                     {"alphabet_max", c.alphabet_max},
                     {"source_h", c.source_h},
                     {"source_w", c.source_w}};
}

inline void from_json(const nlohmann::json& j, CodecConfig& c) {
  j.at("input_channels").get_to(c.input_channels);
  j.at("input_h").get_to(c.input_h);
  j.at("input_w").get_to(c.input_w);
  j.at("latent_channels").get_to(c.latent_channels);
  j.at("hyper_j").get_to(c.hyper_j);
  j.at("tau").get_to(c.tau);
  j.at("codebook_s").get_to(c.codebook_s);
  j.at("prior_n").get_to(c.prior_n);
  j.at("enc_hidden").get_to(c.enc_hidden);
  j.at("dec_hidden").get_to(c.dec_hidden);
  j.at("hyper_hidden").get_to(c.hyper_hidden);
  j.at("head_hidden").get_to(c.head_hidden);
  j.at("alphabet_min").get_to(c.alphabet_min);
  j.at("alphabet_max").get_to(c.alphabet_max);
  j.at("source_h").get_to(c.source_h);
  j.at("source_w").get_to(c.source_w);
}

}  // namespace txc::codec

#endif  // TAXOCODEC_CODEC_CONFIG_HPP_
