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

#include "reverbkit/pool.h"

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "reverbkit/error.h"

namespace reverbkit {

void write_pool_index(const std::filesystem::path& path, const RirPool& pool) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(Errc::kIo, "cannot write " + path.string());
  for (const PoolEntry& e : pool) {
    nlohmann::json row = {{"path", e.path},
                          {"t60", e.t60},
                          {"provenance", provenance_name(e.provenance)},
                          {"rank", e.rank},
                          {"room", e.room}};
    f << row.dump() << '\n';
  }
}

RirPool read_pool_index(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::kMissingFile, "cannot open pool index " + path.string());
  RirPool pool;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto row = nlohmann::json::parse(line);
      PoolEntry e;
      e.path = row.at("path").get<std::string>();
      e.t60 = row.value("t60", 0.0);
      e.provenance = parse_provenance(row.value("provenance", std::string("gas")));
      e.rank = row.value("rank", pool.size());
      e.room = row.value("room", std::string());
      pool.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      fail(Errc::kInvalidConfig,
           path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return pool;
}

}  // namespace reverbkit
