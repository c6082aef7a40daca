// Copyright 2026 The sufcon Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sufcon/automaton.h"
#include "sufcon/errors.h"
#include "sufcon/harness.h"
#include "sufcon/remote_provider.h"
#include "sufcon/vocabulary.h"

namespace sufcon {

namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line;
};

[[noreturn]] void fail(const Entry& e, const std::string& what) {
  throw ConfigError("config line " + std::to_string(e.line) + ": " + what);
}

std::string unescape(std::string_view v, std::size_t line) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != '\\') {
      out.push_back(v[i]);
      continue;
    }
    if (++i == v.size()) throw ConfigError("config line " + std::to_string(line) + ": dangling backslash");
    switch (v[i]) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case '\\': out.push_back('\\'); break;
      default: throw ConfigError("config line " + std::to_string(line) + ": unknown escape \\" + v[i]);
    }
  }
  return out;
}

template <typename T>
T number(const Entry& e, const std::string& key) {
  T v{};
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || e.value.empty()) fail(e, "'" + key + "' must be a number");
  return v;
}

template <typename F>
auto at_line(const Entry& e, F&& f) {
  try {
    return f();
  } catch (const Error& err) {
    fail(e, err.what());
  }
}

bool boolean(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  fail(e, "'" + key + "' must be true or false");
}

ProviderSpec::Kind parse_kind(const Entry& e) {
  for (auto k : {ProviderSpec::Kind::kRemote, ProviderSpec::Kind::kNgram, ProviderSpec::Kind::kTable,
                 ProviderSpec::Kind::kUniform})
    if (to_string(k) == e.value) return k;
  fail(e, "unknown provider '" + e.value + "'");
}

template <typename F>
auto wrap(const std::string& context, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

std::shared_ptr<const LanguageModel> table_provider(Vocabulary vocab, const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::map<TokenSequence, std::vector<double>> rows;
  std::optional<std::vector<double>> fallback;
  auto where = [&](std::size_t line) { return path.string() + " line " + std::to_string(line); };
  std::size_t line = 0;
  for (std::string_view raw : lines_of(text)) {
    ++line;
    if (trim(raw).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
      if (j.contains("fallback")) {
        fallback = j.at("fallback").get<std::vector<double>>();
      } else {
        TokenSequence prefix = j.at("prefix").get<TokenSequence>();
        if (!rows.emplace(prefix, j.at("probs").get<std::vector<double>>()).second)
          throw ConfigError(where(line) + ": duplicate prefix");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where(line) + ": " + e.what());
    }
  }
  return TableProvider::from_probabilities(std::move(vocab), rows, fallback);
}

std::shared_ptr<const LanguageModel> ngram_provider(Vocabulary vocab, const ProviderSpec& spec) {
  std::string text = read_file(spec.corpus);
  std::vector<TokenSequence> corpus;
  std::size_t line = 0;
  for (std::string_view raw : lines_of(text)) {
    ++line;
    if (raw.empty()) continue;
    corpus.push_back(wrap(spec.corpus.string() + " line " + std::to_string(line),
                          [&] { return tokenize_longest_match(vocab, raw); }));
  }
  NgramOptions options;
  options.order = spec.ngram_order;
  options.k = spec.ngram_k;
  return std::make_shared<NgramProvider>(std::move(vocab), corpus, options);
}

}  // namespace

std::string to_string(ProviderSpec::Kind kind) {
  switch (kind) {
    case ProviderSpec::Kind::kRemote: return "remote";
    case ProviderSpec::Kind::kNgram: return "ngram";
    case ProviderSpec::Kind::kTable: return "table";
    case ProviderSpec::Kind::kUniform: return "uniform";
  }
  return "?";
}

void RunConfig::validate() const {
  decode.validate();
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (prompt_template.find("{question}") == std::string::npos)
    throw ConfigError("prompt_template has no {question} placeholder");
  AnswerExtractor{extraction};
  wrap("grammar", [&] { return ConstraintAutomaton::compile(grammar); });
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string, Entry> entries;
  std::size_t line = 0;
  for (std::string_view raw : lines_of(text)) {
    ++line;
    std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line) + ": expected key = value");
    std::string key(trim(s.substr(0, eq)));
    Entry e{unescape(trim(s.substr(eq + 1)), line), line};
    if (!entries.emplace(key, e).second)
      throw ConfigError("config line " + std::to_string(line) + ": duplicate key '" + key + "'");
  }

  RunConfig cfg;
  auto path = [&](const Entry& e) {
    std::filesystem::path p(e.value);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  for (const auto& [key, e] : entries) {
    if (key == "algorithm") cfg.algorithm = at_line(e, [&] { return parse_algorithm(e.value); });
    else if (key == "budget") cfg.decode.budget = number<std::size_t>(e, key);
    else if (key == "completion_allowance") cfg.decode.completion_allowance = number<std::size_t>(e, key);
    else if (key == "penalty_space") cfg.decode.penalty_space = at_line(e, [&] { return parse_penalty_space(e.value); });
    else if (key == "selection") cfg.decode.selection = at_line(e, [&] { return parse_selection(e.value); });
    else if (key == "template") cfg.template_name = e.value;
    else if (key == "grammar") cfg.grammar_file = path(e);
    else if (key == "extraction") cfg.extraction = e.value;
    else if (key == "prompt_template") cfg.prompt_template = e.value;
    else if (key == "provider") cfg.provider.kind = parse_kind(e);
    else if (key == "endpoint") cfg.provider.endpoint = e.value;
    else if (key == "timeout_ms") cfg.provider.timeout_ms = number<std::size_t>(e, key);
    else if (key == "max_retries") cfg.provider.max_retries = number<int>(e, key);
    else if (key == "vocab") cfg.provider.vocab = path(e);
    else if (key == "corpus") cfg.provider.corpus = path(e);
    else if (key == "ngram_order") cfg.provider.ngram_order = number<std::size_t>(e, key);
    else if (key == "ngram_k") cfg.provider.ngram_k = number<double>(e, key);
    else if (key == "table") cfg.provider.table = path(e);
    else if (key == "parallelism") cfg.parallelism = number<std::size_t>(e, key);
    else if (key == "traces") cfg.write_traces = boolean(e, key);
    else if (key == "out") cfg.out_dir = path(e);
    else fail(e, "unknown key '" + key + "'");
  }

  if (!entries.count("provider")) throw ConfigError("config: 'provider' is required");
  auto require = [&](const char* key) {
    if (!entries.count(key))
      throw ConfigError(std::string("config: provider '") + to_string(cfg.provider.kind) + "' needs '" + key + "'");
  };
  switch (cfg.provider.kind) {
    case ProviderSpec::Kind::kRemote: require("endpoint"); break;
    case ProviderSpec::Kind::kNgram: require("vocab"); require("corpus"); break;
    case ProviderSpec::Kind::kTable: require("vocab"); require("table"); break;
    case ProviderSpec::Kind::kUniform: require("vocab"); break;
  }

  if (!cfg.template_name.empty()) {
    if (entries.count("grammar") || entries.count("extraction"))
      throw ConfigError("config: 'template' cannot be combined with 'grammar' or 'extraction'");
    const AnswerTemplate& t = find_template(cfg.template_name);
    cfg.grammar = t.grammar();
    cfg.extraction = t.extraction_pattern();
  } else {
    if (!entries.count("grammar") || !entries.count("extraction"))
      throw ConfigError("config: set 'template', or both 'grammar' and 'extraction'");
    cfg.grammar = wrap("grammar file " + cfg.grammar_file.string(), [&] { return load_grammar_file(cfg.grammar_file); });
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text = read_file(path);
  return parse_run_config(text, path.parent_path());
}

std::shared_ptr<const LanguageModel> make_provider(const ProviderSpec& spec) {
  if (spec.kind == ProviderSpec::Kind::kRemote) {
    RemoteOptions options;
    options.timeout = std::chrono::milliseconds(spec.timeout_ms);
    options.max_retries = spec.max_retries;
    return std::make_shared<RemoteProvider>(spec.endpoint, options);
  }
  Vocabulary vocab = wrap("vocabulary " + spec.vocab.string(), [&] { return load_vocabulary_file(spec.vocab); });
  switch (spec.kind) {
    case ProviderSpec::Kind::kNgram: return ngram_provider(std::move(vocab), spec);
    case ProviderSpec::Kind::kTable:
      return wrap("table " + spec.table.string(), [&] { return table_provider(std::move(vocab), spec.table); });
    default: return std::make_shared<UniformProvider>(std::move(vocab));
  }
}

std::string render_prompt(const std::string& prompt_template, const std::string& question) {
  std::string out;
  const std::string key = "{question}";
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = prompt_template.find(key, pos);
    if (hit == std::string::npos) break;
    out.append(prompt_template, pos, hit - pos);
    out += question;
    pos = hit + key.size();
  }
  out.append(prompt_template, pos);
  return out;
}

TokenSequence build_prompt(const RunConfig& cfg, const Vocabulary& vocab, const Task& task) {
  if (task.prompt_ids) {
    for (TokenId id : *task.prompt_ids)
      if (!vocab.contains(id)) throw ValidationError("prompt id " + std::to_string(id) + " is not a vocabulary token");
    return *task.prompt_ids;
  }
  return tokenize_longest_match(vocab, render_prompt(cfg.prompt_template, task.prompt_text));
}

}  // namespace sufcon
