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


#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "command.h"
#include "valuedec/error.h"
#include "valuedec/io.h"
#include "valuedec/logging.h"

namespace valuedec::cli {
namespace {

using nlohmann::json;

bool is_internal(const CLI::Option* option) {
  const std::string name = option->get_single_name();
  return name.empty() || name == "help" || name == "config" || name == "version";
}

bool is_flag(const CLI::Option* option) { return option->get_expected_max() == 0; }

// Option values are strings inside CLI11; numbers go back out as numbers.
json typed(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.empty()) return text;
  const char* end = text.data() + text.size();
  std::int64_t integer = 0;
  if (const auto [ptr, ec] = std::from_chars(text.data(), end, integer);
      ec == std::errc() && ptr == end) {
    return integer;
  }
  double value = 0.0;
  if (const auto [ptr, ec] = std::from_chars(text.data(), end, value);
      ec == std::errc() && ptr == end) {
    return value;
  }
  return text;
}

std::string config_text(const json& value, const std::string& key) {
  switch (value.type()) {
    case json::value_t::string:
      return value.get<std::string>();
    case json::value_t::boolean:
      return value.get<bool>() ? "true" : "false";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      return value.dump();
    case json::value_t::number_float:
      return format_double(value.get<double>());
    default:
      throw UsageError("config key '" + key + "' must be a string, number or boolean");
  }
}

json load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw UsageError("cannot read config " + path + ": " + e.what());
  }
  json config = json::parse(text, nullptr, false);
  if (config.is_discarded() || !config.is_object()) {
    throw UsageError("config " + path + " is not a JSON object");
  }
  // A sidecar written by an earlier run can be replayed as a config.
  if (config.contains("options") && config["options"].is_object()) return config["options"];
  return config;
}

void report(std::ostream& err, const std::string& kind, const std::string& message,
            const std::string& command, json extra = json::object()) {
  json body = {{"kind", kind}, {"message", message}};
  if (!command.empty()) body["command"] = command;
  body.update(extra);
  err << json{{"error", body}}.dump() << '\n';
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

std::filesystem::path vocab_path_for(const std::filesystem::path& trie,
                                     const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  std::filesystem::path path = trie;
  path += ".vocab";
  return path;
}

ExtractMode parse_extract_mode(const std::string& text) {
  if (text == "top") return ExtractMode::kTopRanked;
  if (text == "clicked") return ExtractMode::kClicked;
  if (text == "all") return ExtractMode::kAll;
  throw InvalidArgument("unknown pair mode '" + text + "'");
}

Context::Context(const CLI::App& command, std::ostream& out)
    : out_(out),
      effective_{{"tool", "valuedec"},
                 {"version", kVersion},
                 {"command", command.get_name()},
                 {"options", effective_options(command)}} {}

void Context::write_output(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer) const {
  write_atomically(path, writer);
  std::filesystem::path sidecar = path;
  sidecar += ".config.json";
  write_atomically(sidecar, [this](std::ostream& out) { out << effective_.dump(2) << '\n'; });
}

CLI::App* Registry::add(const std::string& name, const std::string& description,
                        Handler handler) {
  CLI::App* sub = app_.add_subcommand(name, description);
  sub->add_option("--config", "JSON file of option values; flags take precedence");
  entries_.push_back({sub, std::move(handler)});
  return sub;
}

CLI::Option* Registry::require(CLI::Option* option) {
  required_.insert(option);
  option->description(option->get_description() + " (required)");
  return option;
}

void Registry::check_required(const CLI::App& command) const {
  for (const CLI::Option* option : command.get_options()) {
    if (required_.count(option) && option->count() == 0) {
      throw UsageError(option->get_name() + " is required");
    }
  }
}

void merge_config(CLI::App& command, const json& config) {
  for (const auto& [key, value] : config.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config") continue;
    CLI::Option* option = command.get_option_no_throw("--" + name);
    if (option == nullptr || is_internal(option)) {
      throw UsageError("unknown config key '" + key + "' for " + command.get_name());
    }
    if (option->count() > 0 || value.is_null()) continue;  // flags win
    try {
      if (value.is_array()) {
        std::vector<std::string> items;
        for (const auto& item : value) items.push_back(config_text(item, key));
        option->add_result(items);
      } else {
        option->add_result(config_text(value, key));
      }
      option->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

json effective_options(const CLI::App& command) {
  json options = json::object();
  for (const CLI::Option* option : command.get_options()) {
    if (is_internal(option)) continue;
    std::string key = option->get_single_name();
    std::replace(key.begin(), key.end(), '-', '_');
    if (is_flag(option)) {
      options[key] = option->count() > 0 ? option->as<bool>()
                                         : option->get_default_str() == "true";
      continue;
    }
    std::vector<std::string> values = option->results();
    if (option->count() == 0) {
      const std::string fallback = option->get_default_str();
      values.clear();
      if (!fallback.empty()) values.push_back(fallback);
    }
    if (values.empty()) {
      options[key] = nullptr;
    } else if (values.size() == 1 && option->get_expected_max() <= 1) {
      options[key] = typed(values.front());
    } else {
      json list = json::array();
      for (const auto& v : values) list.push_back(typed(v));
      options[key] = std::move(list);
    }
  }
  return options;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Value-aware constrained decoding over a weighted bidword trie.", "valuedec");
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string log_level;
  app.add_option("--log-level", log_level,
                 "trace|debug|info|warn|error|off (overrides VALUEDEC_LOG)");

  Registry registry(app);
  add_trie_commands(registry);
  add_decode_commands(registry);
  add_data_commands(registry);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto selected = app.get_subcommands();
    out << (selected.empty() ? app.help() : selected.front()->help());
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report(err, "usage", e.what(), "");
    return kExitUsage;
  }
  if (!log_level.empty()) set_log_level(log_level);

  for (const auto& entry : registry.entries()) {
    if (!entry.app->parsed()) continue;
    CLI::App& command = *entry.app;
    const std::string name = command.get_name();
    try {
      const CLI::Option* config = command.get_option("--config");
      const std::string config_path = config->count() ? config->results().front() : "";
      if (!config_path.empty()) merge_config(command, load_config(config_path));
      registry.check_required(command);
      Context context(command, out);
      entry.handler(context);
      return kExitOk;
    } catch (const UsageError& e) {
      report(err, "usage", e.what(), name);
      return kExitUsage;
    } catch (const ParseError& e) {
      report(err, e.kind(), e.what(), name, {{"line", e.line()}});
      return kExitFailure;
    } catch (const Error& e) {
      report(err, e.kind(), e.what(), name);
      return kExitFailure;
    } catch (const std::exception& e) {
      report(err, "internal", e.what(), name);
      return kExitFailure;
    }
  }
  report(err, "usage", "no command given", "");
  return kExitUsage;
}

}  // namespace valuedec::cli
