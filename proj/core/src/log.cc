// Copyright 2026 The valuedec Authors.
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

#include "log.h"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>

#include "valuedec/logging.h"

namespace valuedec {
namespace internal {

spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto l = std::make_shared<spdlog::logger>(
        "valuedec", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("VALUEDEC_LOG")) {
      const auto level = spdlog::level::from_str(env);
      // from_str maps unknown names to "off"; only honor real matches.
      if (level != spdlog::level::off || std::string(env) == "off") {
        l->set_level(level);
      }
    }
    return l;
  }();
  return *instance;
}

}  // namespace internal

void set_log_level(std::string_view level) {
  const std::string name(level);
  const auto parsed = spdlog::level::from_str(name);
  if (parsed != spdlog::level::off || name == "off") {
    internal::logger().set_level(parsed);
  }
}

void log_info(std::string_view message) { internal::logger().info(message); }
void log_warn(std::string_view message) { internal::logger().warn(message); }

}  // namespace valuedec
