/*
 * Copyright 2026 The pseudobox Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pseudobox/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace pseudobox
{

std::shared_ptr<spdlog::logger> logger()
{
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto existing = spdlog::get("pseudobox");
    if (existing) {
      return existing;
    }
    auto created = spdlog::stderr_logger_mt("pseudobox");
    created->set_pattern("%Y-%m-%dT%H:%M:%S.%e %l %n: %v");
    created->set_level(spdlog::level::warn);
    return created;
  }();
  return instance;
}

}  // namespace pseudobox
