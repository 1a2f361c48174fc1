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

#ifndef REVERBKIT_POOL_H_
#define REVERBKIT_POOL_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reverbkit/types.h"

namespace reverbkit {

// One RIR of a curriculum pool. Pool index files are JSON lines:
//   {"path": ..., "t60": ..., "provenance": ..., "rank": ..., "room": ...}
struct PoolEntry {
  std::string path;
  double t60 = 0.0;
  Provenance provenance = Provenance::kGas;
  std::size_t rank = 0;
  std::string room;

  friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

using RirPool = std::vector<PoolEntry>;

void write_pool_index(const std::filesystem::path& path, const RirPool& pool);
RirPool read_pool_index(const std::filesystem::path& path);

}  // namespace reverbkit

#endif  // REVERBKIT_POOL_H_
