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
#include <cmath>
#include <list>

#include "run.h"
#include "sufcon/decode.h"

namespace sufcon {
namespace {

using internal::max_logprob;
using internal::Run;

struct Track {
  int id = -1;
  TokenSequence tokens;  // r ⊙ a
  double score = 0.0;
  Cursor cursor;
  std::size_t bifurcation_pos = 0;
  double key = 0.0;  // penalty comparison key
  std::optional<ProviderSession> session;
  bool shadow = false;
  bool finished = false;
  std::size_t last_step = 0;  // step of the most recent token
  std::size_t adopted = 0;    // adoption order, 0 while never adopted
};

class Bifurcation {
 public:
  Bifurcation(Run& run, const std::shared_ptr<const LanguageModel>& model, const TokenSequence& prompt,
              const ConstraintAutomaton& automaton, const DecodeConfig& cfg)
      : run_(run),
        cfg_(cfg),
        vocab_(model->vocabulary()),
        eog_(vocab_.eog_id()),
        start_(initial_cursor(automaton)),
        start_mask_(allowed_tokens(start_, vocab_)),
        greedy_(model, prompt),
        zero_key_(penalty_key(0.0, 0.0, cfg.penalty_space)) {}

  void run() {
    std::size_t step = 1;
    for (; step <= cfg_.budget; ++step) {
      if (greedy_step(step)) return;
      if (greedy_ended_) break;
    }
    select_and_complete();
  }

 private:
  // Returns true when the decode is complete.
  bool greedy_step(std::size_t step) {
    const LogProbVector& dg = run_.dist(greedy_);
    const double best = max_logprob(dg);
    const TokenId g = argmax(dg, true, false);

    std::vector<Track*> contenders;

    // Existing shadows follow the greedy token while the grammar allows it.
    for (auto it = tracks_.begin(); it != tracks_.end(); ++it) {
      Track& sh = *it;
      if (!sh.shadow) continue;
      if (g == eog_) {
        if (is_accepting(sh.cursor)) {
          return_greedy(step, dg, g, sh);
          return true;
        }
      } else if (auto next = try_step_text(sh.cursor, vocab_.text(g))) {
        sh.cursor = *next;
        contenders.push_back(&sh);
        continue;
      }
      // Deviation: the penalty freezes at this step's gap.
      TokenMask mask = allowed_tokens(sh.cursor, vocab_);
      sh.shadow = false;
      if (mask.empty()) {
        if (&sh == current_) current_ = nullptr;
        continue;
      }
      TokenId v = *masked_argmax(dg, mask, true);
      sh.key = penalty_key(best, dg[v], cfg_.penalty_space);
      run_.record(step, sh.id, v, dg[v], best, penalty_value(sh.key, cfg_.penalty_space), TraceEvent::kExtend,
                  mask.size());
      sh.tokens = y_;
      sh.tokens.push_back(v);
      sh.score = s_ + dg[v];
      sh.last_step = step;
      if (v == eog_) {
        sh.finished = true;
      } else {
        sh.cursor = step_token(sh.cursor, v, vocab_);
        sh.session = greedy_.extend(v);
      }
      contenders.push_back(&sh);
    }

    // A candidate bifurcating at the greedy head.
    std::optional<double> head_penalty;
    if (!start_mask_.empty()) {
      // The greedy token itself is preferred so that ties never hide a shadow.
      TokenId v = start_mask_.contains(g) || (g == eog_ && start_mask_.allow_eog) ? g
                                                                                 : *masked_argmax(dg, start_mask_, true);
      double key = penalty_key(best, dg[v], cfg_.penalty_space);
      head_penalty = penalty_value(key, cfg_.penalty_space);
      if (v == g) {
        if (v == eog_) {
          Track& sh = open(step, dg, v, key, true);
          return_greedy(step, dg, g, sh);
          return true;
        }
        Cursor c = step_token(start_, v, vocab_);
        if (!duplicate_shadow(c)) contenders.push_back(&open(step, dg, v, key, true));
      } else {
        pending_ = Track{-1, y_, s_ + dg[v], start_, y_.size(), key, std::nullopt, false, false, step, 0};
        pending_->tokens.push_back(v);
        pending_token_ = v;
      }
    }

    adopt(step, dg, contenders);

    // The current hypothesis takes one step of its own.
    if (current_ && !current_->shadow && !current_->finished && current_->last_step < step) advance(step);

    run_.record(step, kGreedyTrack, g, dg[g], best, head_penalty, TraceEvent::kExtend);
    if (g == eog_) {
      greedy_ended_ = true;
      return false;
    }
    y_.push_back(g);
    s_ += dg[g];
    greedy_ = greedy_.extend(g);
    return false;
  }

  Track& open(std::size_t step, const LogProbVector& dg, TokenId v, double key, bool shadow) {
    Track t;
    t.id = next_id_++;
    t.tokens = y_;
    t.tokens.push_back(v);
    t.score = s_ + dg[v];
    t.bifurcation_pos = y_.size();
    t.key = key;
    t.shadow = shadow;
    t.last_step = step;
    if (v == eog_) {
      t.finished = true;
      t.cursor = start_;
    } else {
      t.cursor = step_token(start_, v, vocab_);
      if (!shadow) t.session = greedy_.extend(v);
    }
    run_.record(step, t.id, v, dg[v], max_logprob(dg), penalty_value(key, cfg_.penalty_space),
                shadow ? TraceEvent::kShadow : TraceEvent::kReplace, start_mask_.size());
    tracks_.push_back(std::move(t));
    return tracks_.back();
  }

  // Two shadows in the same DFA state behave identically from here on; the
  // earlier bifurcation is kept.
  bool duplicate_shadow(const Cursor& c) const {
    if (c.dfa_state() == Dfa::kNoState) return false;
    for (const Track& t : tracks_)
      if (t.shadow && t.cursor.dfa_state() == c.dfa_state()) return true;
    return false;
  }

  void adopt(std::size_t step, const LogProbVector& dg, const std::vector<Track*>& contenders) {
    // Earliest bifurcation wins ties; the pending head candidate comes last.
    Track* pick = nullptr;
    for (Track* t : contenders)
      if (t != current_ && (!pick || t->key < pick->key)) pick = t;
    bool take_pending = pending_ && (!pick || pending_->key < pick->key);
    double pick_key = take_pending ? pending_->key : pick ? pick->key : 0.0;
    bool better = take_pending || pick;
    if (better && current_ && !(pick_key < current_->key)) better = false;
    if (better) {
      if (take_pending) {
        pick = &open(step, dg, pending_token_, pending_->key, false);
      }
      current_ = pick;
      current_->adopted = ++adoptions_;
      if (current_->finished) retire();
    }
    pending_.reset();
    drop_unused();
  }

  // Moves a finished current hypothesis to the saved set.
  void retire() {
    saved_.push_back(current_);
    current_ = nullptr;
  }

  void drop_unused() {
    for (auto it = tracks_.begin(); it != tracks_.end();) {
      bool keep = it->shadow || &*it == current_ ||
                  std::find(saved_.begin(), saved_.end(), &*it) != saved_.end();
      it = keep ? std::next(it) : tracks_.erase(it);
    }
  }

  void advance(std::size_t step) {
    Track& c = *current_;
    TokenMask mask = allowed_tokens(c.cursor, vocab_);
    if (mask.empty()) {
      run_.result.diagnostic = "hypothesis " + track_tag(c.id) + " is stuck and was dropped";
      current_ = nullptr;
      drop_unused();
      return;
    }
    const LogProbVector& d = run_.dist(*c.session);
    TokenId v = *masked_argmax(d, mask, true);
    run_.record(step, c.id, v, d[v], max_logprob(d), std::nullopt, TraceEvent::kExtend, mask.size());
    c.tokens.push_back(v);
    c.score += d[v];
    c.last_step = step;
    if (v == eog_) {
      c.finished = true;
      retire();
    } else {
      c.cursor = step_token(c.cursor, v, vocab_);
      c.session = c.session->extend(v);
    }
  }

  void return_greedy(std::size_t step, const LogProbVector& dg, TokenId g, const Track& sh) {
    run_.record(step, kGreedyTrack, g, dg[g], max_logprob(dg), std::nullopt, TraceEvent::kExtend);
    auto& r = run_.result;
    r.tokens = y_;
    r.tokens.push_back(g);
    r.score = s_ + dg[g];
    r.finished = true;
    r.bifurcation_pos = sh.bifurcation_pos;
    r.penalty = penalty_value(zero_key_, cfg_.penalty_space);
    run_.terminate(sh.id);
  }

  void select_and_complete() {
    std::vector<Track*> pool = saved_;
    if (current_) pool.push_back(current_);
    Track* chosen = nullptr;
    for (Track* t : pool) {
      if (!chosen) {
        chosen = t;
      } else if (cfg_.selection == Selection::kMinPenalty) {
        if (t->key < chosen->key || (t->key == chosen->key && t->adopted < chosen->adopted)) chosen = t;
      } else if (t->adopted > chosen->adopted) {
        chosen = t;
      }
    }
    std::size_t step = run_.result.stats.steps;
    bool fresh = false;
    if (!chosen) {
      // Nothing usable was recorded; start an answer at the greedy head.
      Track t;
      t.id = next_id_++;
      t.tokens = y_;
      t.score = s_;
      t.cursor = start_;
      t.bifurcation_pos = y_.size();
      t.session = greedy_;
      t.key = std::numeric_limits<double>::infinity();
      tracks_.push_back(std::move(t));
      chosen = &tracks_.back();
      fresh = true;
    } else if (chosen->shadow) {
      // A live shadow holds exactly the greedy tokens.
      chosen->shadow = false;
      chosen->tokens = y_;
      chosen->score = s_;
      chosen->session = greedy_;
    }
    complete(*chosen, step, fresh);
  }

  // Masked greedy steps restricted to tokens that still leave room to reach
  // acceptance within budget + completion_allowance tokens.
  void complete(Track& t, std::size_t step, bool fresh) {
    const std::size_t limit = cfg_.budget + cfg_.completion_allowance;
    while (!t.finished) {
      if (t.tokens.size() >= limit) {
        run_.result.diagnostic = "completion allowance exhausted";
        break;
      }
      const std::size_t room = limit - t.tokens.size();
      TokenMask mask = allowed_tokens(t.cursor, vocab_);
      if (mask.empty()) {
        run_.result.diagnostic = "constraint is stuck during completion";
        break;
      }
      const LogProbVector& d = run_.dist(*t.session);
      std::vector<TokenId> order(mask.allowed);
      if (mask.allow_eog) order.push_back(eog_);
      std::stable_sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
        if (d[a] != d[b]) return d[a] > d[b];
        return a == eog_ && b != eog_;
      });
      std::optional<TokenId> choice;
      std::optional<Cursor> next;
      for (TokenId v : order) {
        if (v == eog_) {
          choice = v;
          break;
        }
        Cursor c = step_token(t.cursor, v, vocab_);
        auto need = tokens_to_accept(c, vocab_);
        if (need && *need + 2 <= room) {
          choice = v;
          next = c;
          break;
        }
      }
      if (!choice) {
        run_.result.diagnostic = "no token reaches acceptance within the completion allowance";
        break;
      }
      ++step;
      run_.record(step, t.id, *choice, d[*choice], max_logprob(d), std::nullopt,
                  fresh ? TraceEvent::kReplace : TraceEvent::kComplete, mask.size());
      fresh = false;
      t.tokens.push_back(*choice);
      t.score += d[*choice];
      if (*choice == eog_) {
        t.finished = true;
      } else {
        t.cursor = *next;
        t.session = t.session->extend(*choice);
      }
    }
    auto& r = run_.result;
    r.tokens = t.tokens;
    r.score = t.score;
    r.finished = t.finished;
    r.bifurcation_pos = t.bifurcation_pos;
    if (std::isfinite(t.key) || t.key == kNegInf) r.penalty = penalty_value(t.key, cfg_.penalty_space);
    run_.terminate(t.id);
  }

  Run& run_;
  const DecodeConfig& cfg_;
  const Vocabulary& vocab_;
  const TokenId eog_;
  const Cursor start_;
  const TokenMask start_mask_;

  ProviderSession greedy_;
  TokenSequence y_;
  double s_ = 0.0;
  bool greedy_ended_ = false;
  const double zero_key_;

  std::list<Track> tracks_;  // stable addresses
  Track* current_ = nullptr;
  std::vector<Track*> saved_;
  std::optional<Track> pending_;
  TokenId pending_token_ = -1;
  int next_id_ = 0;
  std::size_t adoptions_ = 0;
};

}  // namespace

DecodeResult bifurcation_decode(const std::shared_ptr<const LanguageModel>& model, const TokenSequence& prompt,
                                const ConstraintAutomaton& automaton, const DecodeConfig& cfg) {
  cfg.validate();
  Run run(Algorithm::kBifurcation);
  run.set_eog(model->vocabulary().eog_id());
  return run.guard([&] { Bifurcation(run, model, prompt, automaton, cfg).run(); });
}

}  // namespace sufcon
