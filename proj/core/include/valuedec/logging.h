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

#ifndef VALUEDEC_LOGGING_H_
#define VALUEDEC_LOGGING_H_

#include <string_view>

namespace valuedec {

// Overrides the level picked up from VALUEDEC_LOG. Unknown names are ignored.
void set_log_level(std::string_view level);

void log_info(std::string_view message);
void log_warn(std::string_view message);

}  // namespace valuedec

#endif  // VALUEDEC_LOGGING_H_
