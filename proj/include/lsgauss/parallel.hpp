// Copyright 2026 The lsgauss Authors.
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

#ifndef LSGAUSS_PARALLEL_HPP
#define LSGAUSS_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace lsg {

// Runs body(begin, end) over contiguous chunks of [0, count) on up to
// `threads` workers (0 means hardware concurrency). Chunks are claimed from a
// shared counter, so callers must write results by index and reduce in index
// order afterwards. The first exception thrown by any chunk is rethrown.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

unsigned resolve_threads(unsigned requested) noexcept;

}  // namespace lsg

#endif  // LSGAUSS_PARALLEL_HPP
