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

#include <fmt/core.h>

#include <string_view>
#include <utility>

namespace cavks::log {

void emit(std::string_view level, std::string_view message);

/// Suppress info lines (warnings always print). Returns the previous state.
bool set_quiet(bool quiet);
bool quiet();

template <typename... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
  if (!quiet())
    emit("info", fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void warn(fmt::format_string<Args...> f, Args&&... args) {
  emit("warn", fmt::format(f, std::forward<Args>(args)...));
}

} // namespace cavks::log
