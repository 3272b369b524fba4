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

#ifndef TAXOCODEC_VERSION_HPP_
#define TAXOCODEC_VERSION_HPP_

namespace txc {

inline constexpr const char* kToolVersion = "0.1.0";

// Bumped whenever the bitstream or checkpoint layout changes.
inline constexpr int kBitstreamVersion = 1;
inline constexpr int kCheckpointVersion = 1;
inline constexpr int kDatasetVersion = 1;

}  // namespace txc

#endif  // TAXOCODEC_VERSION_HPP_
