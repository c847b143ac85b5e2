// Copyright 2026 The ShadowKit Authors
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

#ifndef SHADOWKIT_ERROR_H_
#define SHADOWKIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace shadowkit {

enum class ErrorCode {
  kInvalidArgument,
  kMalformedXml,
  kCyclicKinematics,
  kMissingMeshFile,
  kUnsupportedJointType,
  kTruncatedFile,
  kBadFaceIndex,
  kJointOutOfRange,
  kDimensionMismatch,
  kIkNotConverged,
  kMissingFile,
  kSchemaError,
  kImageDecodeError,
  kIoError,
  kDegenerateSample,
  kExpertFailed,
};

// Stable identifier for an error code, e.g. "CyclicKinematics".
std::string_view ErrorName(ErrorCode code);

// All library failures are reported with this exception type. The code is
// part of the public contract; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shadowkit

#endif  // SHADOWKIT_ERROR_H_
