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

#ifndef REVERBKIT_WAV_H_
#define REVERBKIT_WAV_H_

#include <filesystem>
#include <optional>
#include <span>

#include <nlohmann/json.hpp>

#include "reverbkit/types.h"

namespace reverbkit {

// Mono RIFF/WAVE reader. Accepts 16-bit PCM and 32-bit IEEE float, with
// either the plain or the extensible format header. Missing files raise
// Errc::kMissingFile, malformed or unsupported content Errc::kCorruptWav.
AudioSignal read_wav(const std::filesystem::path& path);

// Writes mono 32-bit IEEE float. No clipping or normalization is applied.
void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               double sample_rate);
inline void write_wav(const std::filesystem::path& path, const AudioSignal& signal) {
  write_wav(path, signal.samples(), signal.sample_rate());
}

// foo.wav -> foo.json
std::filesystem::path sidecar_path(const std::filesystem::path& wav_path);

// Writes the RIR as float WAV plus its JSON sidecar. `metadata` is merged
// into the sidecar after the provenance and scene id fields.
void write_rir(const std::filesystem::path& path, const ImpulseResponse& rir,
               const nlohmann::json& metadata = nlohmann::json::object());

// Reads an RIR WAV. Provenance and scene id come from the sidecar when one
// exists, else `fallback` is used.
ImpulseResponse read_rir(const std::filesystem::path& path,
                         Provenance fallback = Provenance::kExternalReal);

std::optional<nlohmann::json> read_sidecar(const std::filesystem::path& wav_path);

}  // namespace reverbkit

#endif  // REVERBKIT_WAV_H_
