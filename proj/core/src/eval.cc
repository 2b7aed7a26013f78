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

#include "valuedec/eval.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "log.h"
#include "valuedec/error.h"

namespace valuedec {
namespace {

using nlohmann::json;

// Distinct items of `predicted` known to `ecpm`, in predicted order.
std::vector<std::pair<std::string_view, double>> ranked_items(
    std::span<const std::string> predicted, const EcpmMap& ecpm) {
  std::vector<std::pair<std::string_view, double>> items;
  std::unordered_set<std::string_view> seen;
  for (const auto& p : predicted) {
    const auto it = ecpm.find(p);
    if (it == ecpm.end() || !seen.insert(p).second) continue;
    items.emplace_back(p, it->second);
  }
  return items;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

double hitrate_at_k(const RewriteMap& rewrites, const ClickMap& clicks, std::size_t k) {
  if (k == 0) throw InvalidArgument("K must be positive");
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const auto& [query, clicked] : clicks) {
    total += clicked.size();
    const auto it = rewrites.find(query);
    if (it == rewrites.end()) continue;
    const std::size_t n = std::min(k, it->second.size());
    std::set<std::string_view> top(it->second.begin(), it->second.begin() + n);
    for (const auto& c : clicked) hits += top.count(c);
  }
  if (total == 0) throw InvalidArgument("no query has clicked bidwords");
  return static_cast<double>(hits) / static_cast<double>(total);
}

double spearman_rho(std::span<const std::string> predicted, const EcpmMap& ecpm) {
  const auto items = ranked_items(predicted, ecpm);
  const std::size_t n = items.size();
  if (n < 2) throw InvalidArgument("spearman rho needs at least two ranked items");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].second > items[b].second;
  });
  std::vector<double> reference(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && items[order[j]].second == items[order[i]].second) ++j;
    // Positions i..j-1 share the average of ranks i+1..j.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) reference[order[t]] = rank;
    i = j;
  }
  double sum_d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(i + 1) - reference[i];
    sum_d2 += d * d;
  }
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * sum_d2 / (nn * (nn * nn - 1.0));
}

double oovr(std::span<const std::vector<TokenId>> candidates, const WeightedTrie& trie) {
  if (candidates.empty()) throw InvalidArgument("oovr of an empty candidate list");
  std::size_t missing = 0;
  for (const auto& c : candidates) missing += !trie.contains(c);
  return static_cast<double>(missing) / static_cast<double>(candidates.size());
}

double oovr(std::span<const std::string> candidates, const std::set<std::string>& bidwords) {
  if (candidates.empty()) throw InvalidArgument("oovr of an empty candidate list");
  std::size_t missing = 0;
  for (const auto& c : candidates) missing += !bidwords.count(c);
  return static_cast<double>(missing) / static_cast<double>(candidates.size());
}

double mean_ecpm(const RewriteMap& rewrites, const EcpmMap& ecpm) {
  double sum = 0.0;
  std::size_t queries = 0;
  std::size_t unknown = 0;
  for (const auto& [query, list] : rewrites) {
    if (list.empty()) continue;
    double q = 0.0;
    for (const auto& c : list) {
      const auto it = ecpm.find(c);
      if (it == ecpm.end()) {
        ++unknown;
      } else {
        q += it->second;
      }
    }
    sum += q / static_cast<double>(list.size());
    ++queries;
  }
  if (unknown > 0) {
    internal::logger().warn("{} candidates have no known eCPM and count as 0", unknown);
  }
  if (queries == 0) throw InvalidArgument("no query has candidates");
  return sum / static_cast<double>(queries);
}

void EvalConfig::validate() const {
  if (ks.empty()) throw InvalidArgument("need at least one K");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == 0) throw InvalidArgument("K must be positive");
    if (i > 0 && ks[i] <= ks[i - 1]) throw InvalidArgument("Ks must be strictly ascending");
  }
}

EvaluationReport evaluate(std::span<const RunOutput> run, const GroundTruth& truth,
                          const Embedder& embedder, const EvalConfig& config) {
  config.validate();
  if (run.empty()) throw InvalidArgument("cannot evaluate an empty run");

  EvaluationReport report;
  report.embedder = embedder.name();
  RewriteMap rewrites;
  ClickMap run_clicks;  // hitrate counts only the queries being evaluated
  std::vector<std::string> all_candidates;
  double relevance_sum = 0.0;
  double rho_sum = 0.0;
  for (const auto& out : run) {
    if (!rewrites.emplace(out.query, out.candidates).second) {
      throw InvalidArgument("query '" + out.query + "' appears twice in the run");
    }
    QueryRow row;
    row.query = out.query;
    row.candidates = out.candidates.size();
    const auto clicks = truth.clicks.find(out.query);
    if (clicks != truth.clicks.end()) {
      run_clicks.insert(*clicks);
      row.clicks = clicks->second.size();
      for (std::size_t k : config.ks) {
        const std::size_t n = std::min(k, out.candidates.size());
        std::set<std::string_view> top(out.candidates.begin(), out.candidates.begin() + n);
        std::size_t hits = 0;
        for (const auto& c : clicks->second) hits += top.count(c);
        row.hits_at[k] = hits;
      }
    } else {
      for (std::size_t k : config.ks) row.hits_at[k] = 0;
    }
    if (ranked_items(out.candidates, truth.ecpm).size() >= 2) {
      row.spearman_rho = spearman_rho(out.candidates, truth.ecpm);
      rho_sum += *row.spearman_rho;
      ++report.spearman_queries;
    }
    double ecpm_sum = 0.0;
    double rel_sum = 0.0;
    if (!out.candidates.empty()) {
      const Embedding q = embedder.embed(out.query);
      for (const auto& c : out.candidates) {
        const auto it = truth.ecpm.find(c);
        if (it != truth.ecpm.end()) ecpm_sum += it->second;
        row.out_of_vocabulary += !truth.bidwords.count(c);
        rel_sum += cosine(q, embedder.embed(c));
      }
      row.mean_ecpm = ecpm_sum / static_cast<double>(out.candidates.size());
      row.mean_relevance = rel_sum / static_cast<double>(out.candidates.size());
    }
    relevance_sum += rel_sum;
    all_candidates.insert(all_candidates.end(), out.candidates.begin(), out.candidates.end());
    report.per_query.push_back(std::move(row));
  }

  report.query_count = run.size();
  report.candidate_count = all_candidates.size();
  for (std::size_t k : config.ks) report.hitrate_at[k] = hitrate_at_k(rewrites, run_clicks, k);
  if (report.spearman_queries > 0) {
    report.spearman_rho = rho_sum / static_cast<double>(report.spearman_queries);
  }
  if (!all_candidates.empty()) {
    report.oovr = oovr(all_candidates, truth.bidwords);
    report.mean_ecpm = mean_ecpm(rewrites, truth.ecpm);
    report.mean_relevance = relevance_sum / static_cast<double>(all_candidates.size());
  }
  return report;
}

GroundTruth ground_truth_from_logs(std::span<const LogRecord> records) {
  GroundTruth truth;
  for (const auto& r : records) {
    auto& clicked = truth.clicks[r.query];
    for (const auto& b : r.bidwords) {
      truth.ecpm.insert_or_assign(b.text, b.ecpm);
      truth.bidwords.insert(b.text);
      if (b.clicked) clicked.insert(b.text);
    }
  }
  return truth;
}

// --- Report serialization ---------------------------------------------------------

std::string EvaluationReport::to_json() const {
  json hit = json::object();
  for (const auto& [k, v] : hitrate_at) hit[std::to_string(k)] = v;
  json rows = json::array();
  for (const auto& r : per_query) {
    json hits = json::object();
    for (const auto& [k, v] : r.hits_at) hits[std::to_string(k)] = v;
    rows.push_back({{"query", r.query},
                    {"candidates", r.candidates},
                    {"clicks", r.clicks},
                    {"hits_at", std::move(hits)},
                    {"spearman_rho", r.spearman_rho ? json(*r.spearman_rho) : json(nullptr)},
                    {"mean_ecpm", r.mean_ecpm},
                    {"mean_relevance", r.mean_relevance},
                    {"out_of_vocabulary", r.out_of_vocabulary}});
  }
  json doc = {{"schema", kSchema},
              {"embedder", embedder},
              {"query_count", query_count},
              {"candidate_count", candidate_count},
              {"hitrate_at", std::move(hit)},
              {"spearman_rho", spearman_rho},
              {"spearman_queries", spearman_queries},
              {"oovr", oovr},
              {"mean_ecpm", mean_ecpm},
              {"mean_relevance", mean_relevance},
              {"per_query", std::move(rows)}};
  return doc.dump(2);
}

EvaluationReport EvaluationReport::from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("schema").get<std::string>() != kSchema) {
      throw FormatError("unsupported report schema " + doc.at("schema").dump());
    }
    EvaluationReport r;
    r.embedder = doc.at("embedder").get<std::string>();
    r.query_count = doc.at("query_count").get<std::size_t>();
    r.candidate_count = doc.at("candidate_count").get<std::size_t>();
    for (const auto& [k, v] : doc.at("hitrate_at").items()) {
      r.hitrate_at[std::stoul(k)] = v.get<double>();
    }
    r.spearman_rho = doc.at("spearman_rho").get<double>();
    r.spearman_queries = doc.at("spearman_queries").get<std::size_t>();
    r.oovr = doc.at("oovr").get<double>();
    r.mean_ecpm = doc.at("mean_ecpm").get<double>();
    r.mean_relevance = doc.at("mean_relevance").get<double>();
    for (const auto& row : doc.at("per_query")) {
      QueryRow q;
      q.query = row.at("query").get<std::string>();
      q.candidates = row.at("candidates").get<std::size_t>();
      q.clicks = row.at("clicks").get<std::size_t>();
      for (const auto& [k, v] : row.at("hits_at").items()) {
        q.hits_at[std::stoul(k)] = v.get<std::size_t>();
      }
      if (!row.at("spearman_rho").is_null()) q.spearman_rho = row.at("spearman_rho").get<double>();
      q.mean_ecpm = row.at("mean_ecpm").get<double>();
      q.mean_relevance = row.at("mean_relevance").get<double>();
      q.out_of_vocabulary = row.at("out_of_vocabulary").get<std::size_t>();
      r.per_query.push_back(std::move(q));
    }
    return r;
  } catch (const json::exception& ex) {
    throw FormatError(std::string("evaluation report: ") + ex.what());
  } catch (const std::logic_error& ex) {
    throw FormatError(std::string("evaluation report: ") + ex.what());
  }
}

std::string EvaluationReport::to_text() const {
  std::vector<std::pair<std::string, std::string>> lines;
  for (const auto& [k, v] : hitrate_at) lines.emplace_back("hitrate@" + std::to_string(k), fixed(v));
  lines.emplace_back("spearman_rho", fixed(spearman_rho));
  lines.emplace_back("relevance", fixed(mean_relevance));
  lines.emplace_back("oovr", fixed(oovr));
  lines.emplace_back("mean_ecpm", fixed(mean_ecpm));
  lines.emplace_back("queries", std::to_string(query_count));
  lines.emplace_back("candidates", std::to_string(candidate_count));
  lines.emplace_back("embedder", embedder);
  std::size_t width = 0;
  for (const auto& [k, v] : lines) width = std::max(width, k.size());
  std::ostringstream os;
  for (const auto& [k, v] : lines) os << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
  return os.str();
}

std::string EvaluationReport::to_csv() const {
  std::ostringstream os;
  os << "query,candidates,clicks";
  for (const auto& [k, v] : hitrate_at) os << ",hits@" << k;
  os << ",spearman_rho,mean_ecpm,mean_relevance,out_of_vocabulary\n";
  for (const auto& r : per_query) {
    os << csv_field(r.query) << ',' << r.candidates << ',' << r.clicks;
    for (const auto& [k, v] : hitrate_at) {
      const auto it = r.hits_at.find(k);
      os << ',' << (it == r.hits_at.end() ? 0 : it->second);
    }
    os << ',' << (r.spearman_rho ? fixed(*r.spearman_rho) : "") << ',' << fixed(r.mean_ecpm)
       << ',' << fixed(r.mean_relevance) << ',' << r.out_of_vocabulary << '\n';
  }
  return os.str();
}

}  // namespace valuedec
