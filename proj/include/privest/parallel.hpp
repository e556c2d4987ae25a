// Copyright 2026 The Privest Authors
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

#ifndef PRIVEST_PARALLEL_HPP_
#define PRIVEST_PARALLEL_HPP_

#include <cstdint>
#include <functional>

namespace privest {

// Runs fn(0..count-1) on up to `threads` workers (0 means hardware
// concurrency). Indices are claimed from a shared atomic counter, so each
// index runs exactly once; callers that need determinism must make fn(i)
// independent of scheduling, which every caller in this library does by
// writing to slot i of a preallocated buffer. Exceptions are captured and
// rethrown on the calling thread.
void ParallelFor(std::int64_t count, int threads,
                 const std::function<void(std::int64_t)>& fn);

int ResolveThreadCount(int threads);

}  // namespace privest

#endif  // PRIVEST_PARALLEL_HPP_
