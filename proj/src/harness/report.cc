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
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sufcon/errors.h"
#include "sufcon/harness.h"

namespace sufcon {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string fixed(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw Error("cannot write " + path.string());
}

}  // namespace

std::string format_report_rows(const Report& report) {
  std::string out;
  for (const auto& r : report.rows) {
    ordered_json j;
    j["id"] = r.id;
    j["output"] = r.output;
    j["extracted"] = optional_json(r.extracted);
    j["gold"] = r.gold;
    j["correct"] = r.correct;
    j["finished"] = r.finished;
    j["steps"] = r.steps;
    j["length"] = r.length;
    j["bifurcation_pos"] = optional_json(r.bifurcation_pos);
    j["error"] = optional_json(r.error);
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::string format_summary_json(const Report& report) {
  ReportSummary s = report.summary();
  ordered_json j;
  j["algorithm"] = to_string(report.algorithm);
  j["tasks"] = s.tasks;
  j["correct"] = s.correct;
  j["extracted"] = s.extracted;
  j["finished"] = s.finished;
  j["errors"] = s.errors;
  j["accuracy"] = optional_json(s.accuracy);
  j["prop_finished"] = optional_json(s.prop_finished);
  j["mean_length"] = optional_json(s.mean_length);
  j["mean_bifurcation_pos"] = optional_json(s.mean_bifurcation_pos);
  return j.dump(2) + "\n";
}

std::string format_summary_table(const Report& report) {
  ReportSummary s = report.summary();
  std::ostringstream out;
  auto line = [&](const char* name, const std::string& value) {
    out << std::left << std::setw(22) << name << value << '\n';
  };
  line("algorithm", to_string(report.algorithm));
  line("tasks", std::to_string(s.tasks));
  line("correct", std::to_string(s.correct));
  line("extracted", std::to_string(s.extracted));
  line("finished", std::to_string(s.finished));
  line("errors", std::to_string(s.errors));
  line("accuracy %", fixed(s.accuracy));
  line("proportion finished %", fixed(s.prop_finished));
  line("mean length", fixed(s.mean_length));
  line("mean bifurcation pos", fixed(s.mean_bifurcation_pos));
  if (!report.rows.empty()) {
    out << '\n' << std::left << std::setw(24) << "id" << std::setw(10) << "finished" << std::setw(9) << "correct"
        << "extracted\n";
    for (const auto& r : report.rows) {
      std::string extracted = r.error ? "error" : r.extracted ? ordered_json(*r.extracted).dump() : "none";
      out << std::left << std::setw(24) << r.id << std::setw(10) << (r.finished ? "yes" : "no") << std::setw(9)
          << (r.correct ? "yes" : "no") << extracted << '\n';
    }
  }
  return out.str();
}

std::filesystem::path trace_path(const std::filesystem::path& dir, std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "%06zu.tsv", index);
  return dir / "traces" / name;
}

void write_report(const Report& report, const std::filesystem::path& dir, bool with_traces) {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.jsonl", format_report_rows(report));
  write_file(dir / "summary.json", format_summary_json(report));
  write_file(dir / "summary.txt", format_summary_table(report));
  if (!with_traces) return;
  std::filesystem::create_directories(dir / "traces");
  for (std::size_t i = 0; i < report.rows.size(); ++i)
    if (const auto& t = report.rows[i].trace) write_trace(trace_path(dir, i), t->header, t->records);
}

std::vector<std::optional<TraceFile>> load_traces(const std::filesystem::path& dir, std::size_t count) {
  std::vector<std::optional<TraceFile>> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto path = trace_path(dir, i);
    if (std::filesystem::exists(path)) out[i] = read_trace(path);
  }
  return out;
}

std::string format_entropy_series(const EntropyAnalysis& analysis) {
  std::string out = "position\tmean\tcount\n";
  for (std::size_t i = 0; i < analysis.mean.size(); ++i) {
    out += std::to_string(i + 1) + '\t';
    out += analysis.count[i] ? shortest(analysis.mean[i]) : "-";
    out += '\t' + std::to_string(analysis.count[i]) + '\n';
  }
  return out;
}

}  // namespace sufcon
