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

#include <cmath>
#include <numbers>

#include "sufcon/decode.h"

namespace sufcon {
namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& name, const char* what, const std::pair<const char*, E> (&table)[N]) {
  for (const auto& [text, value] : table)
    if (name == text) return value;
  std::string options;
  for (const auto& [text, value] : table) options += std::string(options.empty() ? "" : ", ") + text;
  throw ConfigError("unknown " + std::string(what) + " '" + name + "' (expected one of: " + options + ")");
}

constexpr std::pair<const char*, Algorithm> kAlgorithms[] = {{"greedy", Algorithm::kGreedy},
                                                             {"constrained_greedy", Algorithm::kConstrainedGreedy},
                                                             {"pipeline", Algorithm::kPipeline},
                                                             {"constrained_beam", Algorithm::kConstrainedBeam},
                                                             {"bifurcation", Algorithm::kBifurcation}};
constexpr std::pair<const char*, PenaltySpace> kSpaces[] = {{"probability", PenaltySpace::kProbability},
                                                            {"log", PenaltySpace::kLog}};
constexpr std::pair<const char*, Selection> kSelections[] = {{"min_penalty", Selection::kMinPenalty},
                                                             {"last", Selection::kLast}};
constexpr std::pair<const char*, TraceEvent> kEvents[] = {{"extend", TraceEvent::kExtend},
                                                          {"replace", TraceEvent::kReplace},
                                                          {"shadow", TraceEvent::kShadow},
                                                          {"terminate", TraceEvent::kTerminate},
                                                          {"complete", TraceEvent::kComplete}};

template <typename E, std::size_t N>
std::string name_of(E value, const std::pair<const char*, E> (&table)[N]) {
  for (const auto& [text, v] : table)
    if (v == value) return text;
  return "?";
}

}  // namespace

std::string to_string(Algorithm a) { return name_of(a, kAlgorithms); }
std::string to_string(PenaltySpace s) { return name_of(s, kSpaces); }
std::string to_string(Selection s) { return name_of(s, kSelections); }
std::string to_string(TraceEvent e) { return name_of(e, kEvents); }
Algorithm parse_algorithm(const std::string& name) { return parse_enum(name, "algorithm", kAlgorithms); }
PenaltySpace parse_penalty_space(const std::string& name) { return parse_enum(name, "penalty space", kSpaces); }
Selection parse_selection(const std::string& name) { return parse_enum(name, "selection", kSelections); }
TraceEvent parse_trace_event(const std::string& name) { return parse_enum(name, "trace event", kEvents); }

void DecodeConfig::validate() const {
  if (budget < 1) throw ConfigError("budget must be at least 1");
}

std::string track_tag(int track) { return track == kGreedyTrack ? "greedy" : "c" + std::to_string(track); }

int parse_track_tag(const std::string& tag) {
  if (tag == "greedy") return kGreedyTrack;
  if (tag.size() >= 2 && tag[0] == 'c' && tag.find_first_not_of("0123456789", 1) == std::string::npos)
    return std::stoi(tag.substr(1));
  throw ParseError("bad track tag '" + tag + "'", 0);
}

TokenId argmax(const LogProbVector& v, bool include_eog, bool eog_wins_ties) {
  const TokenId eog = v.eog_id();
  TokenId best = 0;
  for (TokenId i = 1; i < eog; ++i)
    if (v[i] > v[best]) best = i;
  if (include_eog && (v.eog() > v[best] || (eog_wins_ties && v.eog() == v[best]))) best = eog;
  return best;
}

std::optional<TokenId> masked_argmax(const LogProbVector& v, const TokenMask& mask, bool eog_wins_ties) {
  std::optional<TokenId> best;
  for (TokenId t : mask.allowed)
    if (!best || v[t] > v[*best]) best = t;
  if (mask.allow_eog && (!best || v.eog() > v[*best] || (eog_wins_ties && v.eog() == v[*best]))) best = v.eog_id();
  return best;
}

double masked_max(const LogProbVector& v, const TokenMask& mask) {
  double best = kNegInf;
  for (TokenId t : mask.allowed) best = std::max(best, v[t]);
  if (mask.allow_eog) best = std::max(best, v.eog());
  return best;
}

double stable_prob_diff(double log_a, double log_b) {
  if (std::isnan(log_a) || std::isnan(log_b)) throw DomainError("stable_prob_diff: NaN argument");
  if (log_a < log_b) throw DomainError("stable_prob_diff: log_a < log_b");
  if (log_a == log_b) return kNegInf;
  if (log_b == kNegInf) return log_a;
  const double d = log_b - log_a;  // < 0
  // log(1 - exp(d)) switches formulation at d = -ln 2 to stay accurate.
  return log_a + (d > -std::numbers::ln2 ? std::log(-std::expm1(d)) : std::log1p(-std::exp(d)));
}

double penalty_key(double best, double allowed_best, PenaltySpace space) {
  if (space == PenaltySpace::kLog) {
    if (allowed_best == kNegInf) return std::numeric_limits<double>::infinity();
    return best - allowed_best;
  }
  return stable_prob_diff(best, allowed_best);
}

double penalty_value(double key, PenaltySpace space) { return space == PenaltySpace::kLog ? key : std::exp(key); }

double bifurcation_penalty(const LogProbVector& v, const TokenMask& mask, PenaltySpace space) {
  double best = v[argmax(v, true, false)];
  return penalty_value(penalty_key(best, masked_max(v, mask), space), space);
}

double min_entropy(const LogProbVector& v) {
  double best = kNegInf;
  for (double x : v.values()) best = std::max(best, x);
  return best == 0.0 ? 0.0 : -best;
}

}  // namespace sufcon
