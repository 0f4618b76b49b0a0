/*
 * Copyright 2026 the cavks authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <mutex>

namespace cavks::detail {

// FFTW plan creation/destruction is not thread safe; every translation unit
// that plans must take this one lock. Plan execution on distinct buffers is
// safe without it.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

} // namespace cavks::detail
