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

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "sufcon/char_class.h"
#include "sufcon/dfa.h"
#include "sufcon/errors.h"
#include "sufcon/utf8.h"

namespace sufcon {

std::int32_t Dfa::step(std::int32_t state, char32_t c) const {
  const auto& ts = transitions[static_cast<std::size_t>(state)];
  auto it = std::upper_bound(ts.begin(), ts.end(), c, [](char32_t v, const Transition& t) { return v < t.lo; });
  if (it == ts.begin()) return kNoState;
  --it;
  return c <= it->hi ? it->target : kNoState;
}

namespace {

enum class Assertion { kWordBoundary, kNotWordBoundary, kBegin, kEnd };

// Character context on each side of an assertion.
enum Side : std::uint8_t { kTextEdge = 0, kNonWord = 1, kWord = 2 };

bool holds(Assertion a, Side prev, Side next) {
  switch (a) {
    case Assertion::kWordBoundary: return (prev == kWord) != (next == kWord);
    case Assertion::kNotWordBoundary: return (prev == kWord) == (next == kWord);
    case Assertion::kBegin: return prev == kTextEdge;
    case Assertion::kEnd: return next == kTextEdge;
  }
  return false;
}

struct Node {
  enum Kind { kEpsilon, kClass, kConcat, kAlt, kStar, kAssert } kind;
  CharClass chars;
  Assertion assertion = Assertion::kBegin;
  std::vector<int> children;
};

class Parser {
 public:
  Parser(std::string_view pattern, const RegexOptions& options) : options_(options) {
    try {
      text_ = utf8::decode(pattern);
    } catch (const ParseError& e) {
      throw CompileError(e.what(), 0);
    }
  }

  std::vector<Node>& nodes() { return nodes_; }

  int parse() {
    int root = alternation();
    if (pos_ < text_.size()) fail(text_[pos_] == U')' ? "unmatched ')'" : "unexpected character");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw CompileError(what, pos_); }

  bool at_end() const { return pos_ >= text_.size(); }
  char32_t peek() const { return at_end() ? 0 : text_[pos_]; }

  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  int epsilon() { return add({Node::kEpsilon, {}, {}, {}}); }
  int leaf(CharClass cc) { return add({Node::kClass, std::move(cc), {}, {}}); }
  int concat(std::vector<int> parts) {
    if (parts.empty()) return epsilon();
    if (parts.size() == 1) return parts[0];
    return add({Node::kConcat, {}, {}, std::move(parts)});
  }
  int alt(std::vector<int> parts) {
    if (parts.size() == 1) return parts[0];
    return add({Node::kAlt, {}, {}, std::move(parts)});
  }
  int star(int child) { return add({Node::kStar, {}, {}, {child}}); }

  int alternation() {
    std::vector<int> branches{sequence()};
    while (peek() == U'|') {
      ++pos_;
      branches.push_back(sequence());
    }
    return alt(std::move(branches));
  }

  int sequence() {
    std::vector<int> parts;
    while (!at_end() && peek() != U'|' && peek() != U')') parts.push_back(repeat());
    return concat(std::move(parts));
  }

  // Parses `{n}`, `{n,}` or `{n,m}` at pos_; returns false (and leaves pos_)
  // when the brace does not start a quantifier.
  bool bounded(std::size_t& lo, std::size_t& hi, bool& unbounded) {
    std::size_t p = pos_ + 1;
    auto digits = [&](std::size_t& out) {
      std::size_t b = p;
      out = 0;
      while (p < text_.size() && text_[p] >= U'0' && text_[p] <= U'9') {
        out = out * 10 + (text_[p] - U'0');
        if (out > 1000000) return false;
        ++p;
      }
      return p > b;
    };
    if (!digits(lo)) return false;
    unbounded = false;
    if (p < text_.size() && text_[p] == U'}') {
      hi = lo;
    } else if (p < text_.size() && text_[p] == U',') {
      ++p;
      if (p < text_.size() && text_[p] == U'}') {
        unbounded = true;
        hi = lo;
      } else if (!digits(hi) || p >= text_.size() || text_[p] != U'}') {
        return false;
      }
    } else {
      return false;
    }
    pos_ = p + 1;
    return true;
  }

  int repeat() {
    int node = atom();
    while (!at_end()) {
      char32_t c = peek();
      if (c == U'*') {
        ++pos_;
        node = star(node);
      } else if (c == U'+') {
        ++pos_;
        node = concat({node, star(node)});
      } else if (c == U'?') {
        ++pos_;
        node = alt({node, epsilon()});
      } else if (c == U'{') {
        std::size_t lo = 0, hi = 0;
        bool unbounded = false;
        std::size_t qpos = pos_;
        if (!bounded(lo, hi, unbounded)) break;
        if (!unbounded && hi < lo) throw CompileError("repetition bounds out of order", qpos);
        if (lo > options_.repetition_cap || hi > options_.repetition_cap) {
          throw CompileError("repetition count exceeds cap of " + std::to_string(options_.repetition_cap), qpos);
        }
        node = expand(node, lo, hi, unbounded);
      } else {
        break;
      }
      // Lazy suffixes do not change the recognized language.
      if (peek() == U'?') ++pos_;
    }
    return node;
  }

  int expand(int node, std::size_t lo, std::size_t hi, bool unbounded) {
    std::vector<int> parts(lo, node);
    if (unbounded) {
      parts.push_back(star(node));
    } else if (hi > lo) {
      // x{0,k} as nested (x(x(x)?)?)? keeps the automaton linear in k.
      int tail = alt({node, epsilon()});
      for (std::size_t k = lo + 1; k < hi; ++k) tail = alt({concat({node, tail}), epsilon()});
      parts.push_back(tail);
    }
    return concat(std::move(parts));
  }

  char32_t read_hex(std::size_t count) {
    char32_t v = 0;
    for (std::size_t k = 0; k < count; ++k) {
      if (at_end()) fail("truncated hex escape");
      char32_t c = text_[pos_];
      int h = (c >= U'0' && c <= U'9') ? static_cast<int>(c - U'0')
              : (c >= U'a' && c <= U'f') ? static_cast<int>(c - U'a' + 10)
              : (c >= U'A' && c <= U'F') ? static_cast<int>(c - U'A' + 10)
                                         : -1;
      if (h < 0) fail("bad hex digit");
      v = (v << 4) | static_cast<char32_t>(h);
      ++pos_;
    }
    return v;
  }

  // Escape after the backslash. Returns a class; sets `assertion` for \b, \B.
  CharClass escape(bool in_class, std::optional<Assertion>* assertion) {
    if (at_end()) fail("dangling backslash");
    char32_t c = text_[pos_++];
    switch (c) {
      case U'd': return CharClass::digit();
      case U'D': return CharClass::digit().complement();
      case U'w': return CharClass::word();
      case U'W': return CharClass::word().complement();
      case U's': return CharClass::space();
      case U'S': return CharClass::space().complement();
      case U'n': return CharClass::single(U'\n');
      case U't': return CharClass::single(U'\t');
      case U'r': return CharClass::single(U'\r');
      case U'f': return CharClass::single(U'\f');
      case U'v': return CharClass::single(U'\v');
      case U'0': return CharClass::single(0);
      case U'x': return CharClass::single(read_hex(2));
      case U'u': return CharClass::single(read_hex(4));
      case U'b':
        if (in_class) return CharClass::single(U'\b');
        *assertion = Assertion::kWordBoundary;
        return {};
      case U'B':
        if (in_class) fail("\\B is not allowed in a character class");
        *assertion = Assertion::kNotWordBoundary;
        return {};
      default:
        if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'1' && c <= U'9')) {
          --pos_;
          fail("unsupported escape \\" + utf8::encode(std::u32string(1, c)));
        }
        return CharClass::single(c);
    }
  }

  CharClass bracket() {
    bool negate = false;
    if (peek() == U'^') {
      negate = true;
      ++pos_;
    }
    CharClass cc;
    bool first = true;
    while (true) {
      if (at_end()) fail("unterminated character class");
      char32_t c = text_[pos_];
      if (c == U']' && !first) {
        ++pos_;
        break;
      }
      first = false;
      ++pos_;
      CharClass item;
      bool single = true;
      char32_t lo = c;
      if (c == U'\\') {
        item = escape(true, nullptr);
        single = item.ranges().size() == 1 && item.ranges()[0].first == item.ranges()[0].second;
        if (single) lo = item.ranges()[0].first;
      } else {
        item = CharClass::single(c);
      }
      if (single && peek() == U'-' && pos_ + 1 < text_.size() && text_[pos_ + 1] != U']') {
        ++pos_;
        char32_t hi = text_[pos_++];
        if (hi == U'\\') {
          auto e = escape(true, nullptr);
          if (e.ranges().size() != 1 || e.ranges()[0].first != e.ranges()[0].second) fail("class escape cannot end a range");
          hi = e.ranges()[0].first;
        }
        if (hi < lo) fail("reversed range in character class");
        item = CharClass::range(lo, hi);
      }
      cc.add(item);
    }
    if (negate) cc = cc.complement();
    return cc;
  }

  int atom() {
    char32_t c = peek();
    switch (c) {
      case U'(': {
        ++pos_;
        if (peek() == U'?') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == U':') {
            pos_ += 2;
          } else {
            fail("only non-capturing (?:...) groups are supported");
          }
        }
        int inner = alternation();
        if (peek() != U')') fail("missing ')'");
        ++pos_;
        return inner;
      }
      case U'[':
        ++pos_;
        {
          auto cc = bracket();
          if (cc.empty()) fail("character class matches nothing");
          return leaf(std::move(cc));
        }
      case U'.':
        ++pos_;
        return leaf(CharClass::single(U'\n').complement());
      case U'^':
        ++pos_;
        return add({Node::kAssert, {}, Assertion::kBegin, {}});
      case U'$':
        ++pos_;
        return add({Node::kAssert, {}, Assertion::kEnd, {}});
      case U'\\': {
        ++pos_;
        std::optional<Assertion> a;
        auto cc = escape(false, &a);
        if (a) return add({Node::kAssert, {}, *a, {}});
        return leaf(std::move(cc));
      }
      case U'*':
      case U'+':
      case U'?':
        fail("nothing to repeat");
      default:
        ++pos_;
        return leaf(CharClass::single(c));
    }
  }

  std::u32string text_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
  RegexOptions options_;
};

struct Nfa {
  struct Edge {
    enum Type { kEpsilon, kChar, kAssert } type;
    int chars = -1;  // index into classes
    Assertion assertion = Assertion::kBegin;
    int to = 0;
  };
  std::vector<std::vector<Edge>> states;
  std::vector<CharClass> classes;
  int start = 0;
  int accept = 0;
  bool has_assertions = false;
  bool depends_on_prev = false;

  int new_state() {
    states.emplace_back();
    return static_cast<int>(states.size()) - 1;
  }
};

class NfaBuilder {
 public:
  NfaBuilder(const std::vector<Node>& nodes, std::size_t max_states) : nodes_(nodes), max_states_(max_states) {}

  Nfa build(int root) {
    auto [s, e] = fragment(root);
    nfa_.start = s;
    nfa_.accept = e;
    return std::move(nfa_);
  }

 private:
  int state() {
    if (nfa_.states.size() >= max_states_ * 4) throw CompileError("pattern expands to too many states", 0);
    return nfa_.new_state();
  }
  void eps(int from, int to) { nfa_.states[from].push_back({Nfa::Edge::kEpsilon, -1, {}, to}); }

  std::pair<int, int> fragment(int index) {
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    switch (n.kind) {
      case Node::kEpsilon: {
        int s = state();
        return {s, s};
      }
      case Node::kClass: {
        int s = state(), e = state();
        nfa_.classes.push_back(n.chars);
        nfa_.states[s].push_back({Nfa::Edge::kChar, static_cast<int>(nfa_.classes.size()) - 1, {}, e});
        return {s, e};
      }
      case Node::kAssert: {
        int s = state(), e = state();
        nfa_.has_assertions = true;
        if (n.assertion != Assertion::kEnd) nfa_.depends_on_prev = true;
        nfa_.states[s].push_back({Nfa::Edge::kAssert, -1, n.assertion, e});
        return {s, e};
      }
      case Node::kConcat: {
        auto [s, e] = fragment(n.children[0]);
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          auto [s2, e2] = fragment(n.children[i]);
          eps(e, s2);
          e = e2;
        }
        return {s, e};
      }
      case Node::kAlt: {
        int s = state(), e = state();
        for (int child : n.children) {
          auto [cs, ce] = fragment(child);
          eps(s, cs);
          eps(ce, e);
        }
        return {s, e};
      }
      case Node::kStar: {
        int s = state(), e = state();
        auto [cs, ce] = fragment(n.children[0]);
        eps(s, cs);
        eps(s, e);
        eps(ce, cs);
        eps(ce, e);
        return {s, e};
      }
    }
    return {0, 0};
  }

  const std::vector<Node>& nodes_;
  std::size_t max_states_;
  Nfa nfa_;
};

using StateSet = std::vector<int>;

// Closure over epsilon edges, plus assertion edges when a context is given.
StateSet closure(const Nfa& nfa, const StateSet& seeds, const std::pair<Side, Side>* context) {
  std::vector<char> seen(nfa.states.size(), 0);
  std::vector<int> stack(seeds.begin(), seeds.end());
  for (int s : seeds) seen[s] = 1;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (const auto& e : nfa.states[s]) {
      bool follow = e.type == Nfa::Edge::kEpsilon ||
                    (e.type == Nfa::Edge::kAssert && context && holds(e.assertion, context->first, context->second));
      if (follow && !seen[e.to]) {
        seen[e.to] = 1;
        stack.push_back(e.to);
      }
    }
  }
  StateSet out;
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(static_cast<int>(i));
  return out;
}

struct RawDfa {
  // transitions per state over elementary interval indices
  std::vector<std::vector<std::pair<int, int>>> edges;
  std::vector<char> accepting;
  std::vector<std::pair<char32_t, char32_t>> intervals;
};

RawDfa determinize(const Nfa& nfa, const RegexOptions& options) {
  std::set<char32_t> cuts{0};
  for (const auto& cc : nfa.classes)
    for (const auto& [lo, hi] : cc.ranges()) {
      cuts.insert(lo);
      if (hi < kMaxCodePoint) cuts.insert(hi + 1);
    }
  if (nfa.has_assertions)
    for (const auto& [lo, hi] : CharClass::word().ranges()) {
      cuts.insert(lo);
      cuts.insert(hi + 1);
    }
  RawDfa raw;
  std::vector<char32_t> points(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i < points.size(); ++i) {
    char32_t hi = i + 1 < points.size() ? points[i + 1] - 1 : kMaxCodePoint;
    raw.intervals.emplace_back(points[i], hi);
  }
  // Drop intervals no edge can read.
  {
    std::vector<std::pair<char32_t, char32_t>> used;
    for (const auto& iv : raw.intervals) {
      bool any = std::any_of(nfa.classes.begin(), nfa.classes.end(), [&](const CharClass& cc) { return cc.contains(iv.first); });
      if (any) used.push_back(iv);
    }
    raw.intervals = std::move(used);
  }

  using Key = std::pair<StateSet, Side>;
  std::map<Key, int> ids;
  std::vector<Key> keys;
  auto intern = [&](Key k) {
    auto [it, inserted] = ids.emplace(k, static_cast<int>(keys.size()));
    if (inserted) {
      if (keys.size() >= options.max_states) throw CompileError("automaton exceeds state limit", 0);
      keys.push_back(std::move(k));
      raw.edges.emplace_back();
      raw.accepting.push_back(0);
    }
    return it->second;
  };
  intern({closure(nfa, {nfa.start}, nullptr), kTextEdge});
  for (std::size_t id = 0; id < keys.size(); ++id) {
    const Key key = keys[id];
    std::pair<Side, Side> at_end{key.second, kTextEdge};
    auto final_set = closure(nfa, key.first, &at_end);
    raw.accepting[id] = std::binary_search(final_set.begin(), final_set.end(), nfa.accept);
    for (std::size_t iv = 0; iv < raw.intervals.size(); ++iv) {
      char32_t rep = raw.intervals[iv].first;
      Side next = is_word_char(rep) ? kWord : kNonWord;
      std::pair<Side, Side> ctx{key.second, next};
      auto before = nfa.has_assertions ? closure(nfa, key.first, &ctx) : key.first;
      StateSet moved;
      for (int s : before)
        for (const auto& e : nfa.states[s])
          if (e.type == Nfa::Edge::kChar && nfa.classes[e.chars].contains(rep)) moved.push_back(e.to);
      if (moved.empty()) continue;
      std::sort(moved.begin(), moved.end());
      moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
      Side prev = nfa.depends_on_prev ? next : kTextEdge;
      int target = intern({closure(nfa, moved, nullptr), prev});
      raw.edges[id].emplace_back(static_cast<int>(iv), target);
    }
  }
  return raw;
}

Dfa prune_and_minimize(const RawDfa& raw) {
  std::size_t n = raw.accepting.size();
  // Live states: those reaching acceptance.
  std::vector<std::vector<int>> reverse(n);
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& [iv, t] : raw.edges[s]) reverse[t].push_back(static_cast<int>(s));
  std::vector<char> live(n, 0);
  std::vector<int> stack;
  for (std::size_t s = 0; s < n; ++s)
    if (raw.accepting[s]) {
      live[s] = 1;
      stack.push_back(static_cast<int>(s));
    }
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int p : reverse[s])
      if (!live[p]) {
        live[p] = 1;
        stack.push_back(p);
      }
  }
  if (!live[0]) throw EmptyLanguageError("pattern accepts no string");

  // Moore partition refinement over live states; missing edges go to dead.
  std::vector<int> block(n, -1);
  for (std::size_t s = 0; s < n; ++s)
    if (live[s]) block[s] = raw.accepting[s] ? 1 : 0;
  std::size_t num_blocks = 0;
  while (true) {
    std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> sigs;
    std::vector<int> next(n, -1);
    for (std::size_t s = 0; s < n; ++s) {
      if (!live[s]) continue;
      std::vector<std::pair<int, int>> sig;
      for (const auto& [iv, t] : raw.edges[s])
        if (live[t]) sig.emplace_back(iv, block[t]);
      auto [it, inserted] = sigs.emplace(std::make_pair(block[s], std::move(sig)), static_cast<int>(sigs.size()));
      next[s] = it->second;
    }
    bool stable = sigs.size() == num_blocks;
    num_blocks = sigs.size();
    block = std::move(next);
    if (stable) break;
  }

  // Renumber blocks in BFS order from the start state.
  std::vector<int> order(num_blocks, -1);
  std::vector<int> representative;
  std::vector<int> queue{0};
  order[block[0]] = 0;
  representative.push_back(0);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int s = queue[qi];
    for (const auto& [iv, t] : raw.edges[s]) {
      if (!live[t] || order[block[t]] >= 0) continue;
      order[block[t]] = static_cast<int>(representative.size());
      representative.push_back(t);
      queue.push_back(t);
    }
  }

  Dfa dfa;
  dfa.start = 0;
  dfa.transitions.resize(representative.size());
  dfa.accepting.resize(representative.size());
  for (std::size_t b = 0; b < representative.size(); ++b) {
    int s = representative[b];
    dfa.accepting[b] = raw.accepting[s];
    auto& out = dfa.transitions[b];
    for (const auto& [iv, t] : raw.edges[s]) {
      if (!live[t]) continue;
      auto [lo, hi] = raw.intervals[static_cast<std::size_t>(iv)];
      int target = order[block[t]];
      if (!out.empty() && out.back().target == target && out.back().hi + 1 == lo) {
        out.back().hi = hi;
      } else {
        out.push_back({lo, hi, target});
      }
    }
  }
  return dfa;
}

}  // namespace

Dfa compile_regex(std::string_view pattern, const RegexOptions& options) {
  Parser parser(pattern, options);
  int root = parser.parse();
  NfaBuilder builder(parser.nodes(), options.max_states);
  Nfa nfa = builder.build(root);
  return prune_and_minimize(determinize(nfa, options));
}

}  // namespace sufcon
