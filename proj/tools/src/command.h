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


// Plumbing shared by the subcommands: registration, required options that
// may also come from a config file, and output files that carry the
// effective configuration next to them.

#ifndef VALUEDEC_TOOLS_COMMAND_H_
#define VALUEDEC_TOOLS_COMMAND_H_

#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "valuedec/dataset.h"

namespace valuedec::cli {

// Bad flags or config values discovered after CLI11 has finished parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Context {
 public:
  Context(const CLI::App& command, std::ostream& out);

  std::ostream& out() { return out_; }

  // Every option of the command with the value it ended up with.
  const nlohmann::json& effective_config() const { return effective_; }

  // Writes `path` atomically, then `<path>.config.json` with the effective
  // configuration.
  void write_output(const std::filesystem::path& path,
                    const std::function<void(std::ostream&)>& writer) const;

 private:
  std::ostream& out_;
  nlohmann::json effective_;
};

using Handler = std::function<void(Context&)>;

class Registry {
 public:
  explicit Registry(CLI::App& app) : app_(app) {}

  // Adds a subcommand. Every subcommand gets `--config <json>`.
  CLI::App* add(const std::string& name, const std::string& description, Handler handler);

  // Marks an option as mandatory once flags and config are merged.
  CLI::Option* require(CLI::Option* option);

  // Throws UsageError naming the first required option of `command` that
  // has no value.
  void check_required(const CLI::App& command) const;

  struct Entry {
    CLI::App* app;
    Handler handler;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  CLI::App& app_;
  std::vector<Entry> entries_;
  std::set<const CLI::Option*> required_;
};

void add_trie_commands(Registry& registry);
void add_decode_commands(Registry& registry);
void add_data_commands(Registry& registry);

// Applies config-file values to options not given on the command line.
// Throws UsageError on unknown keys or unusable values.
void merge_config(CLI::App& command, const nlohmann::json& config);

nlohmann::json effective_options(const CLI::App& command);

// `explicit_path` if set, otherwise `<trie>.vocab`.
std::filesystem::path vocab_path_for(const std::filesystem::path& trie,
                                     const std::string& explicit_path);

// "top" | "clicked" | "all"
ExtractMode parse_extract_mode(const std::string& text);

// Shortest decimal text that reads back as the same double.
std::string format_double(double value);

}  // namespace valuedec::cli

#endif  // VALUEDEC_TOOLS_COMMAND_H_
