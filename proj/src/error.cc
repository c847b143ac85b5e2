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

#include "shadowkit/error.h"

#include <string>

namespace shadowkit {

std::string_view ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedXml: return "MalformedXml";
    case ErrorCode::kCyclicKinematics: return "CyclicKinematics";
    case ErrorCode::kMissingMeshFile: return "MissingMeshFile";
    case ErrorCode::kUnsupportedJointType: return "UnsupportedJointType";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kBadFaceIndex: return "BadFaceIndex";
    case ErrorCode::kJointOutOfRange: return "JointOutOfRange";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIkNotConverged: return "IkNotConverged";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kImageDecodeError: return "ImageDecodeError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDegenerateSample: return "DegenerateSample";
    case ErrorCode::kExpertFailed: return "ExpertFailed";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorName(code)) + ": " + message),
      code_(code) {}

}  // namespace shadowkit
