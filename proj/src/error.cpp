// Copyright 2026 The Caption Authors
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

#include "caption/error.hpp"

namespace caption {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingFile: return "MissingFile";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::IneligibleElement: return "IneligibleElement";
    case Errc::SelfTransition: return "SelfTransition";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::DriverFailure: return "DriverFailure";
    case Errc::EmptyRegion: return "EmptyRegion";
    case Errc::ReplayMiss: return "ReplayMiss";
    case Errc::ProviderError: return "ProviderError";
    case Errc::Timeout: return "Timeout";
    case Errc::EmptyResponse: return "EmptyResponse";
    case Errc::MissingDescription: return "MissingDescription";
    case Errc::UnexpectedDescription: return "UnexpectedDescription";
    case Errc::EmptyLabel: return "EmptyLabel";
    case Errc::TooLong: return "TooLong";
    case Errc::RedundantWord: return "RedundantWord";
    case Errc::PopulationTooSmall: return "PopulationTooSmall";
    case Errc::MissingCandidate: return "MissingCandidate";
    case Errc::InsufficientRaters: return "InsufficientRaters";
    case Errc::UnknownComparison: return "UnknownComparison";
    case Errc::RaterMismatch: return "RaterMismatch";
    case Errc::DuplicateConflict: return "DuplicateConflict";
    case Errc::InconsistentIds: return "InconsistentIds";
    case Errc::UnknownSample: return "UnknownSample";
    case Errc::AlreadyDecided: return "AlreadyDecided";
    case Errc::DegenerateMarginals: return "DegenerateMarginals";
    case Errc::SingleGroup: return "SingleGroup";
    case Errc::ZeroTrials: return "ZeroTrials";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::EmptyFamily: return "EmptyFamily";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::IncompleteRatings: return "IncompleteRatings";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace caption
