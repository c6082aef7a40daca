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

#include "sufcon/trace.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "sufcon/errors.h"

namespace sufcon {
namespace {

constexpr std::string_view kMagic = "# sufcon-trace 1";

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw ParseError("bad number '" + std::string(s) + "'", line);
  return v;
}

long long parse_int(std::string_view s, std::size_t line) {
  long long v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw ParseError("bad integer '" + std::string(s) + "'", line);
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t from = 0;
  while (true) {
    auto at = s.find(sep, from);
    out.push_back(s.substr(from, at == std::string_view::npos ? std::string_view::npos : at - from));
    if (at == std::string_view::npos) break;
    from = at + 1;
  }
  return out;
}

}  // namespace

std::string format_trace(const TraceHeader& header, const std::vector<TraceRecord>& records) {
  std::ostringstream out;
  out << kMagic << '\n';
  out << "# algorithm " << to_string(header.algorithm) << '\n';
  out << "# budget " << header.config.budget << '\n';
  out << "# completion_allowance " << header.config.completion_allowance << '\n';
  out << "# penalty_space " << to_string(header.config.penalty_space) << '\n';
  out << "# selection " << to_string(header.config.selection) << '\n';
  out << "# prompt";
  for (TokenId t : header.prompt) out << ' ' << t;
  out << '\n';
  out << "# step\thyp\ttoken\tlogprob\tbest_logprob\tpenalty\tevent\tmask_size\n";
  for (const auto& r : records) {
    out << r.step << '\t' << track_tag(r.track) << '\t' << r.token << '\t' << format_double(r.logprob) << '\t'
        << format_double(r.best_logprob) << '\t' << (r.penalty ? format_double(*r.penalty) : "-") << '\t'
        << to_string(r.event) << '\t' << (r.mask_size ? std::to_string(*r.mask_size) : "-") << '\n';
  }
  return out.str();
}

TraceFile parse_trace(std::string_view text) {
  TraceFile f;
  std::size_t line_no = 0;
  bool magic = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line == kMagic) {
        magic = true;
        continue;
      }
      std::string_view body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      auto sp = body.find(' ');
      std::string_view key = body.substr(0, sp);
      std::string value(sp == std::string_view::npos ? std::string_view{} : body.substr(sp + 1));
      try {
        if (key == "algorithm") {
          f.header.algorithm = parse_algorithm(value);
        } else if (key == "budget") {
          f.header.config.budget = static_cast<std::size_t>(parse_int(value, line_no));
        } else if (key == "completion_allowance") {
          f.header.config.completion_allowance = static_cast<std::size_t>(parse_int(value, line_no));
        } else if (key == "penalty_space") {
          f.header.config.penalty_space = parse_penalty_space(value);
        } else if (key == "selection") {
          f.header.config.selection = parse_selection(value);
        } else if (key == "prompt") {
          for (std::string_view id : split(value, ' '))
            if (!id.empty()) f.header.prompt.push_back(static_cast<TokenId>(parse_int(id, line_no)));
        }
      } catch (const ConfigError& e) {
        throw ParseError(e.what(), line_no);
      }
      continue;
    }
    if (!magic) throw ParseError("missing trace header", line_no);
    auto cols = split(line, '\t');
    if (cols.size() != 8) throw ParseError("expected 8 columns, got " + std::to_string(cols.size()), line_no);
    TraceRecord r;
    r.step = static_cast<std::size_t>(parse_int(cols[0], line_no));
    try {
      r.track = parse_track_tag(std::string(cols[1]));
      r.event = parse_trace_event(std::string(cols[6]));
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    r.token = static_cast<TokenId>(parse_int(cols[2], line_no));
    r.logprob = parse_double(cols[3], line_no);
    r.best_logprob = parse_double(cols[4], line_no);
    if (cols[5] != "-") r.penalty = parse_double(cols[5], line_no);
    if (cols[7] != "-") r.mask_size = static_cast<std::size_t>(parse_int(cols[7], line_no));
    f.records.push_back(r);
  }
  if (!magic) throw ParseError("missing trace header", 0);
  return f;
}

void write_trace(const std::filesystem::path& path, const TraceHeader& header,
                 const std::vector<TraceRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trace file " + path.string());
  out << format_trace(header, records);
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read trace file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

namespace {

struct ReplayTrack {
  TokenSequence tokens;
  std::vector<double> logprobs;
  std::size_t fork = 0;
  bool shadowing = false;
  std::size_t opened_step = 0;
};

template <typename Visit>
ReplayOutcome walk(const std::vector<TraceRecord>& records, TokenId eog, Visit visit) {
  ReplayTrack greedy;
  std::map<int, ReplayTrack> tracks;
  auto append = [&](int id, ReplayTrack& t, const TraceRecord& r, std::size_t index) {
    if (r.token < 0) return;
    if (!t.tokens.empty() && t.tokens.back() == eog) throw ParseError("token after eog on " + track_tag(id), 0);
    visit(id, t, r, index);
    t.tokens.push_back(r.token);
    t.logprobs.push_back(r.logprob);
  };
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TraceRecord& r = records[i];
    if (r.event == TraceEvent::kTerminate) {
      if (i + 1 != records.size()) throw ParseError("records after terminate", 0);
      const ReplayTrack* t = &greedy;
      ReplayOutcome out;
      out.track = r.track;
      if (r.track != kGreedyTrack) {
        auto it = tracks.find(r.track);
        if (it == tracks.end()) throw ParseError("terminate names unknown " + track_tag(r.track), 0);
        t = &it->second;
        out.bifurcation_pos = t->fork;
      }
      out.tokens = t->tokens;
      out.finished = !t->tokens.empty() && t->tokens.back() == eog;
      for (double lp : t->logprobs) out.score += lp;
      out.penalty = r.penalty;
      out.steps = r.step;
      return out;
    }
    if (r.track == kGreedyTrack) {
      for (auto& [id, t] : tracks)
        if (t.shadowing && t.opened_step < r.step) append(id, t, r, i);
      append(kGreedyTrack, greedy, r, i);
      continue;
    }
    if (r.event == TraceEvent::kReplace || r.event == TraceEvent::kShadow) {
      if (tracks.count(r.track)) throw ParseError(track_tag(r.track) + " opened twice", 0);
      ReplayTrack t;
      std::size_t keep = greedy.tokens.size();
      if (keep && greedy.tokens.back() == eog) --keep;
      t.tokens.assign(greedy.tokens.begin(), greedy.tokens.begin() + static_cast<long>(keep));
      t.logprobs.assign(greedy.logprobs.begin(), greedy.logprobs.begin() + static_cast<long>(keep));
      t.fork = keep;
      t.shadowing = r.event == TraceEvent::kShadow;
      t.opened_step = r.step;
      auto& slot = tracks[r.track] = std::move(t);
      append(r.track, slot, r, i);
      continue;
    }
    auto it = tracks.find(r.track);
    if (it == tracks.end()) throw ParseError(track_tag(r.track) + " extended before it was opened", 0);
    it->second.shadowing = false;
    append(r.track, it->second, r, i);
  }
  throw ParseError("trace has no terminate record", 0);
}

}  // namespace

ReplayOutcome replay_trace(const std::vector<TraceRecord>& records, TokenId eog) {
  return walk(records, eog, [](int, const ReplayTrack&, const TraceRecord&, std::size_t) {});
}

std::vector<std::string> verify_trace(const TraceFile& trace, const std::shared_ptr<const LanguageModel>& model,
                                      const ConstraintAutomaton& automaton) {
  const Vocabulary& vocab = model->vocabulary();
  const TokenId eog = vocab.eog_id();
  const Algorithm algo = trace.header.algorithm;
  const std::size_t limit = trace.header.config.budget + trace.header.config.completion_allowance;
  std::vector<std::string> problems;
  auto fail = [&](std::size_t index, const std::string& what) {
    problems.push_back("record " + std::to_string(index + 1) + ": " + what);
  };
  // Bifurcation records after the greedy loop belong to the completion phase.
  std::size_t last_greedy = 0;
  for (std::size_t i = 0; i < trace.records.size(); ++i)
    if (trace.records[i].track == kGreedyTrack && trace.records[i].event != TraceEvent::kTerminate) last_greedy = i;
  walk(trace.records, eog, [&](int id, const ReplayTrack& t, const TraceRecord& r, std::size_t index) {
    TokenSequence prefix = trace.header.prompt;
    prefix.insert(prefix.end(), t.tokens.begin(), t.tokens.end());
    LogProbVector d = model->next_dist(prefix);
    if (!(d[r.token] == r.logprob)) fail(index, "logprob differs from the model");
    if (!(d[argmax(d, true, false)] == r.best_logprob)) fail(index, "best_logprob differs from the model");
    if (id == kGreedyTrack) {
      TokenId want = argmax(d, algo != Algorithm::kConstrainedBeam, false);
      if (want != r.token) fail(index, "greedy token is not the argmax");
      return;
    }
    if (r.event != TraceEvent::kReplace && r.event != TraceEvent::kShadow && r.event != TraceEvent::kExtend &&
        r.event != TraceEvent::kComplete)
      return;
    if (r.track == kGreedyTrack) return;  // a shadow copying the greedy token
    Cursor c = initial_cursor(automaton);
    try {
      for (std::size_t k = t.fork; k < t.tokens.size(); ++k) c = step_token(c, t.tokens[k], vocab);
    } catch (const Error& e) {
      fail(index, std::string("track left the language: ") + e.what());
      return;
    }
    TokenMask mask = allowed_tokens(c, vocab);
    bool allowed = r.token == eog ? mask.allow_eog : mask.contains(r.token);
    if (!allowed) {
      fail(index, "token is outside the mask");
      return;
    }
    if (r.mask_size && *r.mask_size != mask.size()) fail(index, "mask size differs");
    if (r.event == TraceEvent::kShadow) {
      if (!(d[r.token] == masked_max(d, mask))) fail(index, "shadow token is not a masked argmax");
      return;
    }
    bool budgeted = r.event == TraceEvent::kComplete || (algo == Algorithm::kBifurcation && index > last_greedy);
    if (!budgeted) {
      if (*masked_argmax(d, mask, true) != r.token) fail(index, "token is not the masked argmax");
      return;
    }
    // Completion: best-scoring token that can still finish within the limit.
    const std::size_t room = limit - t.tokens.size();
    std::optional<TokenId> want;
    std::vector<TokenId> order(mask.allowed);
    if (mask.allow_eog) order.push_back(eog);
    std::stable_sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
      if (d[a] != d[b]) return d[a] > d[b];
      return a == eog && b != eog;
    });
    for (TokenId v : order) {
      if (v == eog) {
        want = v;
        break;
      }
      auto need = tokens_to_accept(step_token(c, v, vocab), vocab);
      if (need && *need + 2 <= room) {
        want = v;
        break;
      }
    }
    if (want != r.token) fail(index, "completion token is not the best feasible token");
  });
  return problems;
}

}  // namespace sufcon
