/*
 * Copyright 2026 The xbandit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace xbandit {

inline constexpr const char* kWorkersEnv = "XBANDIT_WORKERS";

// Worker count from XBANDIT_WORKERS, defaulting to 1.
inline unsigned worker_count() {
  const char* env = std::getenv(kWorkersEnv);
  if (env == nullptr) return 1;
  try {
    const long n = std::stol(env);
    return n >= 1 ? static_cast<unsigned>(std::min(n, 256L)) : 1u;
  } catch (const std::exception&) {
    return 1;
  }
}

// Runs body(i) for i in [0, n) over contiguous blocks. Callers write results
// into slot i and reduce afterwards in index order, so the outcome does not
// depend on the worker count.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  if (workers == 0) workers = worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace xbandit
