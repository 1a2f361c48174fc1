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

#include "reverbkit/wav.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "reverbkit/error.h"

namespace reverbkit {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& why) {
  fail(Errc::kCorruptWav, path.string() + ": " + why);
}

}  // namespace

AudioSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kMissingFile, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    corrupt(path, "not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  double sample_rate = 0.0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Truncated trailing data chunk: keep what is present.
      if (std::memcmp(chunk, "data", 4) == 0 && have_fmt) {
        data = bytes.data() + body;
        data_size = bytes.size() - body;
        break;
      }
      corrupt(path, "chunk extends past end of file");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) corrupt(path, "fmt chunk too short");
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      sample_rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40) corrupt(path, "extensible fmt chunk too short");
        format = read_u16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) corrupt(path, "missing fmt chunk");
  if (data == nullptr) corrupt(path, "missing data chunk");
  if (channels != 1) corrupt(path, "only mono audio is supported");
  if (sample_rate <= 0.0) corrupt(path, "invalid sample rate");

  std::vector<double> samples;
  if (format == kFormatPcm && bits == 16) {
    samples.resize(data_size / 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = static_cast<std::int16_t>(read_u16(data + 2 * i)) / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    samples.resize(data_size / 4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = std::bit_cast<float>(read_u32(data + 4 * i));
    }
  } else {
    corrupt(path, "unsupported sample format (need 16-bit PCM or 32-bit float)");
  }
  try {
    return AudioSignal(std::move(samples), sample_rate);
  } catch (const Error& e) {
    corrupt(path, e.what());
  }
}

void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               double sample_rate) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 4);
  const auto rate = static_cast<std::uint32_t>(std::lround(sample_rate));
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, kFormatFloat);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 4);
  put_u16(out, 4);
  put_u16(out, 32);
  out += "data";
  put_u32(out, data_bytes);
  for (double s : samples) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Errc::kIo, "cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) fail(Errc::kIo, "short write to " + path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& wav_path) {
  std::filesystem::path p = wav_path;
  p.replace_extension(".json");
  return p;
}

void write_rir(const std::filesystem::path& path, const ImpulseResponse& rir,
               const nlohmann::json& metadata) {
  write_wav(path, rir.samples(), rir.sample_rate());
  nlohmann::json side = {{"provenance", provenance_name(rir.provenance())},
                         {"sample_rate", rir.sample_rate()},
                         {"length", rir.size()}};
  if (rir.scene_id()) side["scene_id"] = *rir.scene_id();
  for (const auto& [key, value] : metadata.items()) side[key] = value;
  std::ofstream f(sidecar_path(path), std::ios::trunc);
  if (!f) fail(Errc::kIo, "cannot write " + sidecar_path(path).string());
  f << side.dump(2) << '\n';
}

std::optional<nlohmann::json> read_sidecar(const std::filesystem::path& wav_path) {
  const auto p = sidecar_path(wav_path);
  std::ifstream in(p);
  if (!in) return std::nullopt;
  try {
    nlohmann::json doc;
    in >> doc;
    return doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kInvalidConfig, p.string() + ": " + e.what());
  }
}

ImpulseResponse read_rir(const std::filesystem::path& path, Provenance fallback) {
  AudioSignal signal = read_wav(path);
  Provenance provenance = fallback;
  std::optional<std::string> scene_id;
  if (auto side = read_sidecar(path)) {
    if (side->contains("provenance")) {
      provenance = parse_provenance((*side)["provenance"].get<std::string>());
    }
    if (side->contains("scene_id")) scene_id = (*side)["scene_id"].get<std::string>();
  }
  if (signal.size() == 0) fail(Errc::kCorruptWav, path.string() + ": empty RIR");
  std::vector<double> samples(signal.samples().begin(), signal.samples().end());
  return ImpulseResponse(std::move(samples), signal.sample_rate(), provenance,
                         std::move(scene_id));
}

}  // namespace reverbkit
