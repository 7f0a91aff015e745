// Copyright 2026 The SFS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sfs/error.hpp"

namespace sfs {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kDriftSingularity: return "drift_singularity";
    case ErrorKind::kNonFinite: return "non_finite_state";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kUnknownTarget: return "unknown_target";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace sfs
