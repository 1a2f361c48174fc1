/*
Copyright 2026 The reverbkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "reverbkit/error.h"

namespace reverbkit {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kNonPositiveDimension: return "non_positive_dimension";
    case Errc::kPositionOutsideRoom: return "position_outside_room";
    case Errc::kCoincidentPositions: return "coincident_positions";
    case Errc::kMaterialOutOfRange: return "material_out_of_range";
    case Errc::kInvalidArgument: return "invalid_argument";
    case Errc::kNonFiniteSample: return "non_finite_sample";
    case Errc::kSampleRateMismatch: return "sample_rate_mismatch";
    case Errc::kLengthMismatch: return "length_mismatch";
    case Errc::kZeroSignal: return "zero_signal";
    case Errc::kInsufficientDecay: return "insufficient_decay";
    case Errc::kUnachievableTarget: return "unachievable_target";
    case Errc::kReceiverContainsSource: return "receiver_contains_source";
    case Errc::kMissingFile: return "missing_file";
    case Errc::kCorruptWav: return "corrupt_wav";
    case Errc::kIo: return "io";
    case Errc::kInvalidConfig: return "invalid_config";
    case Errc::kCyclicStage: return "cyclic_stage";
  }
  return "unknown";
}

}  // namespace reverbkit
