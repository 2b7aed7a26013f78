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

#ifndef VALUEDEC_IO_H_
#define VALUEDEC_IO_H_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace valuedec {

// Runs `writer` against a temporary file next to `path`, flushes it and
// renames it over `path`. On any failure the temporary is removed and the
// previous contents of `path` stay untouched.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& writer);

std::string read_file(const std::filesystem::path& path);

// Lines without their terminators ("\n" or "\r\n").
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace valuedec

#endif  // VALUEDEC_IO_H_
