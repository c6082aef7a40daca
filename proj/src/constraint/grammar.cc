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

#include "sufcon/grammar.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "sufcon/errors.h"
#include "sufcon/utf8.h"

namespace sufcon {

bool ContextFreeGrammar::has_nonterminal(std::string_view name) const {
  return std::any_of(rules.begin(), rules.end(), [&](const GrammarRule& r) { return r.lhs == name; });
}

std::vector<std::string> ContextFreeGrammar::nonterminals() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto note = [&](const std::string& n) {
    if (seen.insert(n).second) out.push_back(n);
  };
  for (const auto& r : rules) {
    note(r.lhs);
    for (const auto& s : r.rhs)
      if (!s.terminal) note(s.nonterminal);
  }
  return out;
}

void validate(const ContextFreeGrammar& g) {
  std::set<std::string> defined;
  for (const auto& r : g.rules) defined.insert(r.lhs);
  if (!defined.count(g.start)) throw ValidationError("start symbol '" + g.start + "' has no rule");
  for (const auto& r : g.rules) {
    for (const auto& s : r.rhs) {
      if (s.terminal && s.chars.empty()) throw ValidationError("empty character class in rule for '" + r.lhs + "'");
      if (!s.terminal && !defined.count(s.nonterminal)) {
        throw ValidationError("nonterminal '" + s.nonterminal + "' used in rule for '" + r.lhs + "' has no rule");
      }
    }
  }
}

namespace {

bool is_name_start(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || c == U'_'; }
bool is_name_char(char32_t c) { return is_name_start(c) || (c >= U'0' && c <= U'9') || c == U'\''; }

int hex_digit(char32_t c) {
  if (c >= U'0' && c <= U'9') return static_cast<int>(c - U'0');
  if (c >= U'a' && c <= U'f') return static_cast<int>(c - U'a' + 10);
  if (c >= U'A' && c <= U'F') return static_cast<int>(c - U'A' + 10);
  return -1;
}

// Character-level reader for one rule line.
class RuleLexer {
 public:
  RuleLexer(std::u32string text, std::size_t line) : text_(std::move(text)), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == U' ' || text_[pos_] == U'\t')) ++pos_;
  }
  bool done() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == U'#';
  }
  char32_t peek() const { return pos_ < text_.size() ? text_[pos_] : 0; }
  bool consume(std::u32string_view s) {
    skip_space();
    if (text_.compare(pos_, s.size(), s) == 0) {
      pos_ += s.size();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " (column " + std::to_string(pos_ + 1) + ")", line_);
  }

  std::string name() {
    skip_space();
    if (!is_name_start(peek())) fail("expected a nonterminal name");
    std::size_t begin = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return utf8::encode(std::u32string_view(text_).substr(begin, pos_ - begin));
  }

  char32_t escape() {
    // positioned after the backslash
    if (pos_ >= text_.size()) fail("dangling backslash");
    char32_t c = text_[pos_++];
    switch (c) {
      case U'n': return U'\n';
      case U't': return U'\t';
      case U'r': return U'\r';
      case U'u': {
        auto read4 = [&] {
          char32_t v = 0;
          for (int k = 0; k < 4; ++k) {
            int h = pos_ < text_.size() ? hex_digit(text_[pos_]) : -1;
            if (h < 0) fail("bad \\u escape");
            v = (v << 4) | static_cast<char32_t>(h);
            ++pos_;
          }
          return v;
        };
        char32_t v = read4();
        if (v >= 0xD800 && v <= 0xDBFF && pos_ + 1 < text_.size() && text_[pos_] == U'\\' && text_[pos_ + 1] == U'u') {
          pos_ += 2;
          char32_t lo = read4();
          v = 0x10000 + ((v - 0xD800) << 10) + (lo - 0xDC00);
        }
        return v;
      }
      default: return c;
    }
  }

  std::u32string quoted() {
    // positioned at the opening quote
    ++pos_;
    std::u32string out;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated string literal");
      char32_t c = text_[pos_++];
      if (c == U'"') break;
      if (c == U'\\') c = escape();
      out.push_back(c);
    }
    return out;
  }

  CharClass bracket() {
    // positioned at '['
    ++pos_;
    bool negate = false;
    if (peek() == U'^') {
      negate = true;
      ++pos_;
    }
    CharClass cc;
    bool first = true;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated character class");
      char32_t c = text_[pos_++];
      if (c == U']' && !first) break;
      first = false;
      if (c == U'\\') c = escape();
      char32_t hi = c;
      if (peek() == U'-' && pos_ + 1 < text_.size() && text_[pos_ + 1] != U']') {
        ++pos_;
        hi = text_[pos_++];
        if (hi == U'\\') hi = escape();
        if (hi < c) fail("reversed range in character class");
      }
      cc.add(c, hi);
    }
    return negate ? cc.complement() : cc;
  }

 private:
  std::u32string text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

// Parses the alternatives after `->` (or after a leading `|`).
void parse_alternatives(RuleLexer& lex, const std::string& lhs, ContextFreeGrammar& g) {
  GrammarRule current{lhs, {}};
  bool saw_item = false;
  bool epsilon = false;
  auto finish = [&] {
    if (!saw_item && !epsilon) lex.fail("empty alternative (use ~ for the empty sequence)");
    g.rules.push_back(std::move(current));
    current = GrammarRule{lhs, {}};
    saw_item = epsilon = false;
  };
  while (!lex.done()) {
    char32_t c = lex.peek();
    if (c == U'|') {
      lex.consume(U"|");
      finish();
      continue;
    }
    if (epsilon) lex.fail("~ must stand alone in its alternative");
    if (c == U'~') {
      if (saw_item) lex.fail("~ must stand alone in its alternative");
      lex.consume(U"~");
      epsilon = true;
    } else if (c == U'"') {
      auto s = lex.quoted();
      if (s.empty()) lex.fail("empty string literal (use ~)");
      for (char32_t ch : s) current.rhs.push_back(GrammarSymbol::term(ch));
      saw_item = true;
    } else if (c == U'[') {
      auto cc = lex.bracket();
      if (cc.empty()) lex.fail("character class matches nothing");
      current.rhs.push_back(GrammarSymbol::term(std::move(cc)));
      saw_item = true;
    } else {
      current.rhs.push_back(GrammarSymbol::nonterm(lex.name()));
      saw_item = true;
    }
  }
  finish();
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

bool blank_or_comment(std::string_view line) {
  auto first = line.find_first_not_of(" \t");
  return first == std::string_view::npos || line[first] == '#';
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

ContextFreeGrammar parse_cfg_rules(std::string_view start, std::string_view rules_text, std::size_t first_line) {
  ContextFreeGrammar g;
  g.start = std::string(trim(start));
  std::string last_lhs;
  auto lines = split_lines(rules_text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i])) continue;
    std::u32string decoded;
    try {
      decoded = utf8::decode(lines[i]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), first_line + i);
    }
    RuleLexer lex(std::move(decoded), first_line + i);
    if (lex.consume(U"|")) {
      if (last_lhs.empty()) lex.fail("continuation line without a preceding rule");
      parse_alternatives(lex, last_lhs, g);
      continue;
    }
    last_lhs = lex.name();
    if (!lex.consume(U"->")) lex.fail("expected '->'");
    parse_alternatives(lex, last_lhs, g);
  }
  validate(g);
  return g;
}

GrammarSpec parse_grammar_file_text(std::string_view text) {
  auto lines = split_lines(text);
  std::size_t i = 0;
  auto next_content = [&]() -> std::size_t {
    while (i < lines.size() && blank_or_comment(lines[i])) ++i;
    return i;
  };
  if (next_content() >= lines.size()) throw ParseError("empty grammar file", 0);
  auto header = trim(lines[i]);
  if (header.rfind("kind:", 0) != 0) throw ParseError("first line must be 'kind: regular' or 'kind: cfg'", i + 1);
  auto kind = trim(header.substr(5));
  ++i;
  if (kind == "regular") {
    // The pattern line is taken verbatim (it may contain '#').
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    if (i >= lines.size()) throw ParseError("regular grammar file has no pattern line", i);
    std::string pattern(lines[i]);
    for (std::size_t k = i + 1; k < lines.size(); ++k) {
      if (!blank_or_comment(lines[k])) throw ParseError("regular grammar file must carry exactly one pattern line", k + 1);
    }
    return GrammarSpec::regular(pattern);
  }
  if (kind != "cfg") throw ParseError("unknown grammar kind '" + std::string(kind) + "'", i);
  if (next_content() >= lines.size()) throw ParseError("cfg grammar file has no start line", i);
  auto start_line = trim(lines[i]);
  if (start_line.rfind("start:", 0) != 0) throw ParseError("expected 'start: <NT>'", i + 1);
  auto start = trim(start_line.substr(6));
  std::size_t rules_begin = i + 1;
  std::string rest;
  for (std::size_t k = rules_begin; k < lines.size(); ++k) {
    rest.append(lines[k]);
    rest.push_back('\n');
  }
  return GrammarSpec::context_free(parse_cfg_rules(start, rest, rules_begin + 1));
}

GrammarSpec load_grammar_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open grammar file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_grammar_file_text(ss.str());
}

namespace {

bool is_single(const GrammarSymbol& s) {
  return s.terminal && s.chars.ranges().size() == 1 && s.chars.ranges()[0].first == s.chars.ranges()[0].second;
}

// Body of a quoted literal for one character.
std::string render_literal_char(char32_t c) {
  std::string out;
  if (c == U'"' || c == U'\\') {
    out.push_back('\\');
    out.push_back(static_cast<char>(c));
  } else if (c == U'\n') {
    out += "\\n";
  } else if (c == U'\t') {
    out += "\\t";
  } else if (c < 0x20 || c == 0x7F || c > 0xFFFF) {
    // Reuse the bracket renderer for control characters.
    auto b = CharClass::single(c).to_string();
    out += b.substr(1, b.size() - 2);
  } else {
    utf8::append(out, c);
  }
  return out;
}

std::string render_class(const CharClass& cc) {
  CharClass complement = cc.complement();
  if (!complement.empty() && complement.ranges().size() < cc.ranges().size())
    return "[^" + complement.to_string().substr(1);
  return cc.to_string();
}

}  // namespace

std::string format_grammar_file(const GrammarSpec& spec) {
  if (spec.kind == GrammarKind::kRegular) return "kind: regular\n" + spec.pattern + "\n";
  std::string out = "kind: cfg\nstart: " + spec.cfg.start + "\n";
  for (const auto& r : spec.cfg.rules) {
    out += r.lhs + " ->";
    if (r.rhs.empty()) out += " ~";
    for (std::size_t i = 0; i < r.rhs.size();) {
      const GrammarSymbol& s = r.rhs[i];
      if (is_single(s)) {
        out += " \"";
        for (; i < r.rhs.size() && is_single(r.rhs[i]); ++i) out += render_literal_char(r.rhs[i].chars.ranges()[0].first);
        out += "\"";
        continue;
      }
      out += " " + (s.terminal ? render_class(s.chars) : s.nonterminal);
      ++i;
    }
    out += "\n";
  }
  return out;
}

}  // namespace sufcon
