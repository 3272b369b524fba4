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

#ifndef TAXOCODEC_ERROR_HPP_
#define TAXOCODEC_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace txc {

// All recoverable failures carry a stable machine-parsable code plus a
// human-readable detail string. The CLI prints "error: <code> <detail>".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + " " + detail), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& detail) {
  throw Error(code, detail);
}

inline void require(bool cond, const std::string& code, const std::string& detail) {
  if (!cond) fail(code, detail);
}

}  // namespace txc

#endif  // TAXOCODEC_ERROR_HPP_
