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

#ifndef REVERBKIT_ERROR_H_
#define REVERBKIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace reverbkit {

enum class Errc {
  kNonPositiveDimension,
  kPositionOutsideRoom,
  kCoincidentPositions,
  kMaterialOutOfRange,
  kInvalidArgument,
  kNonFiniteSample,
  kSampleRateMismatch,
  kLengthMismatch,
  kZeroSignal,
  kInsufficientDecay,
  kUnachievableTarget,
  kReceiverContainsSource,
  kMissingFile,
  kCorruptWav,
  kIo,
  kInvalidConfig,
  kCyclicStage,
};

std::string_view errc_name(Errc code);

// All library failures are reported through this exception.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace reverbkit

#endif  // REVERBKIT_ERROR_H_
