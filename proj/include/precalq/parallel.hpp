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

#pragma once

namespace precalq {

/// Caps OpenMP parallelism for every kernel in the library. Values < 1 mean
/// "use the OpenMP default".
void set_thread_limit(int threads) noexcept;

/// Reads PRECALQ_THREADS from the environment and applies it, if set.
void apply_thread_env() noexcept;

int max_threads() noexcept;

}  // namespace precalq
