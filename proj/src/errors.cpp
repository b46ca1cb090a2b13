// Copyright 2026 The ppgspoof Authors.
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

#include "errors.hpp"

namespace ppgspoof {

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kDataValidity: return "data_validity";
    case ErrorKind::kDegenerateInput: return "degenerate_input";
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kDependency: return "dependency";
    case ErrorKind::kCalibration: return "calibration";
    case ErrorKind::kTraining: return "training";
    case ErrorKind::kFeatureExtraction: return "feature_extraction";
  }
  return "unknown";
}

}  // namespace ppgspoof
