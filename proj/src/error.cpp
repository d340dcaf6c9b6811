// Copyright 2026 The precalq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "precalq/error.hpp"

namespace precalq {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::NonFinite: return "NonFinite";
    case Errc::IoFailure: return "IoFailure";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::BadParam: return "BadParam";
    case Errc::BadAlpha: return "BadAlpha";
    case Errc::ZeroWeightWithPenalty: return "ZeroWeightWithPenalty";
    case Errc::EmptyGroup: return "EmptyGroup";
    case Errc::BadBits: return "BadBits";
    case Errc::BadPercentile: return "BadPercentile";
    case Errc::BadConfig: return "BadConfig";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::CoverageViolation: return "CoverageViolation";
    case Errc::Corrupt: return "Corrupt";
    case Errc::EmptySamples: return "EmptySamples";
    case Errc::NonPositiveDensity: return "NonPositiveDensity";
    case Errc::BadScale: return "BadScale";
    case Errc::ZeroWeight: return "ZeroWeight";
    case Errc::ShapeMismatch: return "ShapeMismatch";
  }
  return "Unknown";
}

}  // namespace precalq
