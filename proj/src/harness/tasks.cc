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

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sufcon/errors.h"
#include "sufcon/harness.h"

namespace sufcon {

namespace {

Task parse_task(const nlohmann::json& j, std::size_t line) {
  auto fail = [line](const std::string& what) -> ParseError { return ParseError("task file: " + what, line); };
  if (!j.is_object()) throw fail("expected an object");
  Task t;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string()) throw fail("missing string field 'id'");
  t.id = id->get<std::string>();
  auto gold = j.find("gold");
  if (gold == j.end() || !gold->is_string()) throw fail("missing string field 'gold'");
  t.gold = gold->get<std::string>();
  auto prompt = j.find("prompt");
  bool has_prompt = prompt != j.end() && !prompt->is_null();
  if (has_prompt) {
    if (!prompt->is_string()) throw fail("'prompt' must be a string");
    t.prompt_text = prompt->get<std::string>();
  }
  auto ids = j.find("prompt_ids");
  if (ids != j.end() && !ids->is_null()) {
    if (!ids->is_array()) throw fail("'prompt_ids' must be an array of token ids");
    TokenSequence seq;
    for (const auto& v : *ids) {
      if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > INT32_MAX)
        throw fail("'prompt_ids' must be an array of token ids");
      seq.push_back(static_cast<TokenId>(v.get<long long>()));
    }
    t.prompt_ids = std::move(seq);
  } else if (!has_prompt) {
    throw fail("task '" + t.id + "' needs 'prompt' or 'prompt_ids'");
  }
  return t;
}

}  // namespace

std::vector<Task> parse_tasks(std::string_view text) {
  std::vector<Task> tasks;
  std::set<std::string> seen;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("task file: malformed JSON: ") + e.what(), line);
    }
    Task t = parse_task(j, line);
    if (!seen.insert(t.id).second) throw ParseError("task file: duplicate id '" + t.id + "'", line);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<Task> load_tasks(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read task file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tasks(ss.str());
}

}  // namespace sufcon
