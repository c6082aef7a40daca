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

#include <boost/regex.hpp>

#include "sufcon/errors.h"
#include "sufcon/harness.h"
#include "sufcon/utf8.h"

namespace sufcon {

namespace {

std::vector<GrammarSymbol> literal(std::string_view text) {
  std::vector<GrammarSymbol> out;
  for (char32_t c : utf8::decode(text)) out.push_back(GrammarSymbol::term(c));
  return out;
}

}  // namespace

GrammarSpec AnswerTemplate::grammar() const {
  if (shape == Shape::kPattern) return GrammarSpec::regular(regex_escape(lead) + body);
  // Answer -> lead body "{" Body "}"; Body -> ~ | Body Item; Item -> [^{}] | "{" Body "}"
  ContextFreeGrammar g;
  g.start = "Answer";
  auto open = GrammarSymbol::term(U'{');
  auto close = GrammarSymbol::term(U'}');
  std::vector<GrammarSymbol> answer = literal(lead + body);
  answer.push_back(open);
  answer.push_back(GrammarSymbol::nonterm("Body"));
  answer.push_back(close);
  g.rules.push_back({"Answer", answer});
  g.rules.push_back({"Body", {}});
  g.rules.push_back({"Body", {GrammarSymbol::nonterm("Body"), GrammarSymbol::nonterm("Item")}});
  CharClass braces = CharClass::single(U'{');
  braces.add(U'}', U'}');
  g.rules.push_back({"Item", {GrammarSymbol::term(braces.complement())}});
  g.rules.push_back({"Item", {open, GrammarSymbol::nonterm("Body"), close}});
  return GrammarSpec::context_free(std::move(g));
}

std::string AnswerTemplate::extraction_pattern() const {
  if (shape == Shape::kPattern) return regex_escape(lead) + "(" + body + ")";
  return regex_escape(lead + body) + R"(\{((?:[^{}]|\{(?1)\})*)\})";
}

const std::vector<AnswerTemplate>& shipped_templates() {
  static const std::vector<AnswerTemplate> templates = {
      {"integer", "The answer is: ", AnswerTemplate::Shape::kPattern, R"([+-]?\d+(\.\d+)?)"},
      {"mcq", "The answer is: ", AnswerTemplate::Shape::kPattern, R"(\b[A-J]\b)"},
      {"boxed", "The answer is: ", AnswerTemplate::Shape::kBalancedBraces, R"(\boxed)"},
  };
  return templates;
}

const AnswerTemplate& find_template(const std::string& name) {
  for (const auto& t : shipped_templates())
    if (t.name == name) return t;
  throw ConfigError("unknown answer template '" + name + "'");
}

std::string regex_escape(std::string_view literal) {
  std::string out;
  for (char c : literal) {
    if (std::string_view(R"(\^$.|?*+()[]{}/)").find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

struct AnswerExtractor::Impl {
  std::string pattern;
  boost::regex regex;
};

AnswerExtractor::AnswerExtractor(const std::string& pattern) {
  auto impl = std::make_shared<Impl>();
  impl->pattern = pattern;
  try {
    impl->regex = boost::regex(pattern, boost::regex::perl);
  } catch (const boost::regex_error& e) {
    throw ConfigError("extraction pattern '" + pattern + "' does not compile: " + e.what());
  }
  impl_ = std::move(impl);
}

std::optional<std::string> AnswerExtractor::extract(std::string_view text) const {
  std::optional<std::string> last;
  boost::cregex_iterator it(text.data(), text.data() + text.size(), impl_->regex), end;
  for (; it != end; ++it) {
    const auto& m = *it;
    last = m.size() > 1 ? m[1].str() : m[0].str();
  }
  return last;
}

const std::string& AnswerExtractor::pattern() const { return impl_->pattern; }

std::optional<std::string> extract_answer(std::string_view text, const std::string& pattern) {
  return AnswerExtractor(pattern).extract(text);
}

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\n\r\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

bool score(const std::optional<std::string>& extracted, std::string_view gold) {
  return extracted && trim(*extracted) == trim(gold);
}

}  // namespace sufcon
