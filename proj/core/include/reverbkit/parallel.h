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

#ifndef REVERBKIT_PARALLEL_H_
#define REVERBKIT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace reverbkit {

// REVERBKIT_THREADS when set to a positive integer, else hardware threads.
std::size_t default_parallelism();

// Resolves 0 to default_parallelism().
std::size_t resolve_parallelism(std::size_t threads);

// Calls fn(i) for every i in [0, count) across `threads` workers. Work
// items are claimed dynamically; callers that need worker-count independent
// results must write into per-item slots and reduce in index order.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace reverbkit

#endif  // REVERBKIT_PARALLEL_H_
