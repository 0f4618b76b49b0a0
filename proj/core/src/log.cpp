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

#include "cavks/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace cavks::log {

namespace {
std::atomic<bool> g_quiet{false};
std::mutex g_mutex;
} // namespace

void emit(std::string_view level, std::string_view message) {
  std::scoped_lock lock(g_mutex);
  fmt::print(stdout, "[{}] {}\n", level, message);
  std::fflush(stdout);
}

bool set_quiet(bool quiet) { return g_quiet.exchange(quiet); }

bool quiet() { return g_quiet.load(); }

} // namespace cavks::log
