// Copyright 2026 The dystts Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DYSTTS_ERROR_H_
#define DYSTTS_ERROR_H_

#include <stdexcept>
#include <string>

namespace dystts {

enum class ErrorCode {
  kInvalidArgument,  // bad input value or precondition violation
  kParse,            // malformed file content
  kIo,               // file could not be opened, read or written
  kNumeric,          // non-finite value encountered
  kEmptyOutput,      // synthesis produced zero frames
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kParse:
      return "parse error";
    case ErrorCode::kIo:
      return "io error";
    case ErrorCode::kNumeric:
      return "numeric error";
    case ErrorCode::kEmptyOutput:
      return "empty output";
  }
  return "error";
}

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace dystts

#endif  // DYSTTS_ERROR_H_
