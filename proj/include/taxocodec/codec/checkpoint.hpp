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

#ifndef TAXOCODEC_CODEC_CHECKPOINT_HPP_
#define TAXOCODEC_CODEC_CHECKPOINT_HPP_

#include <string>

#include "json.hpp"
#include "taxocodec/nn/param.hpp"

namespace txc::codec {

// Versioned binary checkpoint: a JSON metadata block followed by named f32
// tensors in registry order. load(save(m)) reproduces every parameter
// bitwise.
void save_checkpoint(const std::string& path, const nlohmann::json& meta, const nn::ParamSet<float>& params);

// Reads only the metadata block (used to reconstruct the model before
// loading its weights).
nlohmann::json peek_checkpoint_meta(const std::string& path);

// Fills `params` by exact name and shape match; rejects version drift,
// missing entries, extras and shape mismatches. Returns the metadata.
nlohmann::json load_checkpoint(const std::string& path, const nn::ParamSet<float>& params);

}  // namespace txc::codec

#endif  // TAXOCODEC_CODEC_CHECKPOINT_HPP_
