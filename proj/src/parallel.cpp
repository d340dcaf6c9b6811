// Copyright 2026 The precalq Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "precalq/parallel.hpp"

#include <omp.h>

#include <cstdlib>

namespace precalq {

void set_thread_limit(int threads) noexcept {
  if (threads >= 1) omp_set_num_threads(threads);
}

void apply_thread_env() noexcept {
  if (const char* env = std::getenv("PRECALQ_THREADS")) {
    set_thread_limit(std::atoi(env));
  }
}

int max_threads() noexcept { return omp_get_max_threads(); }

}  // namespace precalq
