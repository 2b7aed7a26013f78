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

#include "valuedec/jsonl.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "valuedec/error.h"

namespace valuedec {
namespace {

using nlohmann::json;

void for_each_object(std::istream& in, const std::function<void(const json&)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json doc = json::parse(line);
      if (!doc.is_object()) throw ParseError(line_no, "expected a JSON object");
      fn(doc);
    } catch (const json::exception& ex) {
      throw ParseError(line_no, ex.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& ex) {
      throw ParseError(line_no, ex.what());
    }
  }
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

double finite_ecpm(const json& v) {
  const double x = v.get<double>();
  if (!std::isfinite(x) || x < 0.0) throw InvalidArgument("eCPM must be finite and >= 0");
  return x;
}

}  // namespace

std::vector<LogRecord> read_log_records(std::istream& in) {
  std::vector<LogRecord> out;
  for_each_object(in, [&](const json& doc) {
    LogRecord r;
    r.query = doc.at("query").get<std::string>();
    for (const auto& b : doc.at("bidwords")) {
      r.bidwords.push_back({b.at("text").get<std::string>(), finite_ecpm(b.at("ecpm")),
                            b.value("clicked", false)});
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<LogRecord> read_log_records(const std::filesystem::path& path) {
  auto in = open(path);
  return read_log_records(in);
}

void write_log_records(std::ostream& out, std::span<const LogRecord> records) {
  for (const auto& r : records) {
    json bidwords = json::array();
    for (const auto& b : r.bidwords) {
      bidwords.push_back({{"text", b.text}, {"ecpm", b.ecpm}, {"clicked", b.clicked}});
    }
    out << json{{"query", r.query}, {"bidwords", std::move(bidwords)}}.dump() << '\n';
  }
}

std::vector<std::string> read_queries(std::istream& in) {
  std::vector<std::string> out;
  for_each_object(in, [&](const json& doc) {
    out.push_back(doc.at("query").get<std::string>());
  });
  return out;
}

std::vector<std::string> read_queries(const std::filesystem::path& path) {
  auto in = open(path);
  return read_queries(in);
}

std::string to_json_line(const DecodedQuery& decoded) {
  json candidates = json::array();
  for (const auto& c : decoded.candidates) {
    candidates.push_back({{"text", c.text}, {"log_score", c.log_score}, {"value", c.value}});
  }
  return json{{"query", decoded.query}, {"candidates", std::move(candidates)}}.dump();
}

std::vector<DecodedQuery> read_decoded(std::istream& in) {
  std::vector<DecodedQuery> out;
  for_each_object(in, [&](const json& doc) {
    DecodedQuery d;
    d.query = doc.at("query").get<std::string>();
    for (const auto& c : doc.at("candidates")) {
      d.candidates.push_back({c.at("text").get<std::string>(),
                              c.value("log_score", 0.0), c.value("value", 0.0)});
    }
    out.push_back(std::move(d));
  });
  return out;
}

std::vector<DecodedQuery> read_decoded(const std::filesystem::path& path) {
  auto in = open(path);
  return read_decoded(in);
}

std::string to_json_line(const PreferencePair& pair) {
  return json{{"query", pair.query},
              {"chosen", pair.chosen},
              {"rejected", pair.rejected},
              {"ecpm_chosen", pair.ecpm_chosen},
              {"ecpm_rejected", pair.ecpm_rejected}}
      .dump();
}

std::vector<PreferencePair> read_preference_pairs(std::istream& in) {
  std::vector<PreferencePair> out;
  for_each_object(in, [&](const json& doc) {
    out.push_back({doc.at("query").get<std::string>(), doc.at("chosen").get<std::string>(),
                   doc.at("rejected").get<std::string>(), finite_ecpm(doc.at("ecpm_chosen")),
                   finite_ecpm(doc.at("ecpm_rejected"))});
  });
  return out;
}

std::string to_json_line(const SftTask1& task) {
  return json{{"task", 1}, {"prompt", task.prompt}, {"query", task.query},
              {"bidword", task.bidword}}
      .dump();
}

std::string to_json_line(const SftTask2& task) {
  return json{{"task", 2}, {"prompt", task.prompt}, {"query", task.query},
              {"bidword_list", task.bidword_list}}
      .dump();
}

}  // namespace valuedec
