// Copyright 2026 The Scaloforge Authors.
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


#include "scaloforge/error.hpp"

namespace scaloforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::format: return "format";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::channel_count: return "channel-count";
    case ErrorCode::aliasing: return "aliasing";
    case ErrorCode::duplicate: return "duplicate";
    case ErrorCode::schema: return "schema";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::scale_degenerate: return "scale-degenerate";
    case ErrorCode::degenerate_filter: return "degenerate-filter";
    case ErrorCode::length: return "length";
    case ErrorCode::shape: return "shape";
    case ErrorCode::flag: return "flag";
    case ErrorCode::integrity: return "integrity";
    case ErrorCode::chunk: return "chunk";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::collapse: return "collapse";
    case ErrorCode::strategy: return "strategy";
    case ErrorCode::label_range: return "label-range";
    case ErrorCode::misalignment: return "misalignment";
    case ErrorCode::missing_prediction: return "missing-prediction";
    case ErrorCode::contract: return "contract";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " error: " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace scaloforge
