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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "corpus.h"
#include "fake_server.h"
#include "sufcon/harness.h"
#include "sufcon/vocabulary.h"

namespace sufcon {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("sufcon_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write(dir_ / "vocab.tsv", serialize_vocabulary(testing::answer_vocabulary()));
    write(dir_ / "corpus.txt", "x+y = 4\nThe answer is: 42\nx+y = 3.5 so The answer is: 3.5\n");
    write(dir_ / "tasks.jsonl",
          "{\"id\": \"a\", \"prompt\": \"x+y\", \"gold\": \"4\"}\n"
          "{\"id\": \"b\", \"prompt\": \"y\", \"gold\": \"42\"}\n"
          "{\"id\": \"c\", \"prompt_ids\": [1, 2], \"gold\": \"3.5\"}\n");
    write(dir_ / "run.cfg",
          "algorithm = bifurcation\n"
          "budget = 16\n"
          "completion_allowance = 32\n"
          "template = integer\n"
          "prompt_template = {question} =\n"
          "provider = ngram\n"
          "vocab = vocab.tsv\n"
          "corpus = corpus.txt\n"
          "ngram_order = 3\n"
          "ngram_k = 0.5\n"
          "parallelism = 2\n"
          "traces = true\n");
  }

  Outcome decode(const std::string& args) {
    fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    std::string cmd = std::string(SUFCON_DECODE_BINARY) + " " + args + " >" + out.string() + " 2>" + err.string();
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, RunWritesReport) {
  Outcome o = decode("run --config " + path("run.cfg") + " --tasks " + path("tasks.jsonl") + " --out " + path("out"));
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("proportion finished %"), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "out" / "summary.txt"), o.out);
  auto rows = slurp(dir_ / "out" / "report.jsonl");
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 3);
  EXPECT_EQ(rows.find("\"finished\":false"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "out" / "summary.json").find("\"prop_finished\": 100.0"), std::string::npos);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(trace_path(dir_ / "out", i)));
}

TEST_F(Cli, RunTwiceIsByteIdentical) {
  std::string args = "run --config " + path("run.cfg") + " --tasks " + path("tasks.jsonl") + " --out ";
  ASSERT_EQ(decode(args + path("one")).code, 0);
  ASSERT_EQ(decode(args + path("two")).code, 0);
  for (const char* name : {"report.jsonl", "summary.json", "summary.txt", "traces/000000.tsv", "traces/000002.tsv"})
    EXPECT_EQ(slurp(dir_ / "one" / name), slurp(dir_ / "two" / name)) << name;
}

TEST_F(Cli, OutDirFromConfig) {
  write(dir_ / "out.cfg", slurp(dir_ / "run.cfg") + "out = from_config\n");
  ASSERT_EQ(decode("run --config " + path("out.cfg") + " --tasks " + path("tasks.jsonl")).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_config" / "report.jsonl"));
  EXPECT_EQ(decode("run --config " + path("run.cfg") + " --tasks " + path("tasks.jsonl")).code, 1);
}

TEST_F(Cli, ReplayAndVerify) {
  ASSERT_EQ(decode("run --config " + path("run.cfg") + " --tasks " + path("tasks.jsonl") + " --out " + path("out")).code, 0);
  std::string trace = trace_path(dir_ / "out", 0).string();
  Outcome o = decode("replay " + trace + " --config " + path("run.cfg"));
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("\"finished\":true"), std::string::npos);
  std::string first_row = slurp(dir_ / "out" / "report.jsonl");
  first_row = first_row.substr(0, first_row.find('\n'));
  auto output = nlohmann::json::parse(first_row)["output"].get<std::string>();
  EXPECT_EQ(nlohmann::json::parse(o.out)["output"], output);

  EXPECT_EQ(decode("replay " + trace + " --vocab " + path("vocab.tsv")).code, 0);
  EXPECT_EQ(decode("replay " + trace).code, 1);

  // Changing one token id invalidates the trace.
  std::string text = slurp(trace);
  auto line = text.find("\n1\tgreedy\t");
  ASSERT_NE(line, std::string::npos);
  auto token = line + std::string("\n1\tgreedy\t").size();
  text[token] = text[token] == '1' ? '2' : '1';
  write(dir_ / "tampered.tsv", text);
  Outcome bad = decode("replay " + path("tampered.tsv") + " --config " + path("run.cfg"));
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("mismatch"), std::string::npos);
}

TEST_F(Cli, TaskErrorsExitTwoWithReport) {
  write(dir_ / "bad_tasks.jsonl",
        "{\"id\": \"a\", \"prompt\": \"x+y\", \"gold\": \"4\"}\n{\"id\": \"q\", \"prompt\": \"why?\", \"gold\": \"4\"}\n");
  Outcome o = decode("run --config " + path("run.cfg") + " --tasks " + path("bad_tasks.jsonl") + " --out " + path("out"));
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("task q"), std::string::npos);
  auto rows = slurp(dir_ / "out" / "report.jsonl");
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 2);
  EXPECT_NE(rows.find("\"error\":null"), std::string::npos);
  EXPECT_NE(rows.find("\"error\":\""), std::string::npos);
}

TEST_F(Cli, ConfigErrorsExitOne) {
  std::string tasks = " --tasks " + path("tasks.jsonl") + " --out " + path("out");
  EXPECT_EQ(decode("run --config " + path("missing.cfg") + tasks).code, 1);
  write(dir_ / "unknown.cfg", slurp(dir_ / "run.cfg") + "colour = red\n");
  Outcome o = decode("run --config " + path("unknown.cfg") + tasks);
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("colour"), std::string::npos);
  write(dir_ / "dup.jsonl", "{\"id\": \"a\", \"prompt\": \"x\", \"gold\": \"4\"}\n{\"id\": \"a\", \"prompt\": \"y\", \"gold\": \"4\"}\n");
  EXPECT_EQ(decode("run --config " + path("run.cfg") + " --tasks " + path("dup.jsonl") + " --out " + path("o")).code, 1);
  EXPECT_EQ(decode("").code, 1);
  EXPECT_EQ(decode("run --config " + path("run.cfg")).code, 1);
  EXPECT_EQ(decode("--help").code, 0);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(Cli, AnalyzeEntropy) {
  Outcome o = decode("analyze-entropy --config " + path("run.cfg") + " --tasks " + path("tasks.jsonl"));
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out.rfind("position\tmean\tcount\n1\t", 0), 0u);
  ASSERT_EQ(decode("analyze-entropy --config " + path("run.cfg") + " --tasks " + path("tasks.jsonl") + " --out " +
                   path("entropy.tsv"))
                .code,
            0);
  EXPECT_EQ(slurp(dir_ / "entropy.tsv"), o.out);
}

TEST_F(Cli, GrammarCheck) {
  write(dir_ / "g.grammar", "kind: regular\nab|ac\n");
  Outcome o = decode("grammar check " + path("g.grammar") + " --enumerate 2");
  ASSERT_EQ(o.code, 0);
  EXPECT_EQ(o.out, "ok: regular grammar, 3 states\n\"\"\n\"a\"\n\"ab\"\taccepting\n\"ac\"\taccepting\n");
  Outcome cfg = decode("grammar check " + std::string(SUFCON_SOURCE_DIR) + "/data/templates/boxed.grammar");
  EXPECT_EQ(cfg.out, "ok: context-free grammar\n");
  Outcome dyck = decode("grammar check " + std::string(SUFCON_SOURCE_DIR) +
                        "/data/templates/boxed.grammar --enumerate 22 --alphabet 'The answris:\\bod{}x'");
  EXPECT_NE(dyck.out.find("\"The answer is: \\\\boxed{\"\n"), std::string::npos);
  write(dir_ / "bad.grammar", "kind: regular\n(ab\n");
  EXPECT_EQ(decode("grammar check " + path("bad.grammar")).code, 1);
  EXPECT_EQ(decode("grammar check " + path("none.grammar")).code, 1);
}

TEST_F(Cli, TemplatePrintsGrammarFile) {
  Outcome o = decode("template integer");
  ASSERT_EQ(o.code, 0);
  EXPECT_EQ(o.out, "# extraction: " + find_template("integer").extraction_pattern() + "\n" +
                       format_grammar_file(find_template("integer").grammar()));
  EXPECT_EQ(decode("template roman").code, 1);
}

// Serves the answer vocabulary with uniform distributions.
struct AnswerServer : testing::FakeServer {
  AnswerServer() {
    Vocabulary v = testing::answer_vocabulary();
    std::size_t n = v.size();
    vocab = [doc = serialize_vocabulary(v), n](testing::json& out) {
      out = {{"vocab", doc}, {"eog_id", n}, {"protocol", 1}};
    };
    next = [n](const std::vector<TokenId>&, httplib::Response& res) {
      std::vector<double> lp(n + 1, -std::log(static_cast<double>(n + 1)));
      res.set_content(testing::json{{"logprobs", lp}}.dump(), "application/json");
    };
  }
};

TEST_F(Cli, RemoteProviderRun) {
  AnswerServer server;
  write(dir_ / "remote.cfg",
        "template = integer\nbudget = 6\ncompletion_allowance = 32\nprompt_template = {question}\n"
        "provider = remote\nendpoint = " + server.endpoint() + "\ntimeout_ms = 2000\nmax_retries = 0\n");
  Outcome o = decode("run --config " + path("remote.cfg") + " --tasks " + path("tasks.jsonl") + " --out " + path("out"));
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(slurp(dir_ / "out" / "summary.json").find("\"prop_finished\": 100.0"), std::string::npos);
  EXPECT_GT(server.next_hits.load(), 0);

  Outcome fetched = decode("vocab fetch --endpoint " + server.endpoint() + " --out " + path("fetched.tsv"));
  ASSERT_EQ(fetched.code, 0) << fetched.err;
  EXPECT_EQ(load_vocabulary_file(dir_ / "fetched.tsv"), testing::answer_vocabulary());
  EXPECT_EQ(decode("vocab fetch --endpoint " + server.endpoint()).out, serialize_vocabulary(testing::answer_vocabulary()));
}

TEST_F(Cli, UnreachableServerExitsTwoWithReport) {
  int port;
  {
    AnswerServer server;
    port = std::stoi(server.endpoint().substr(server.endpoint().rfind(':') + 1));
  }
  std::string endpoint = "http://127.0.0.1:" + std::to_string(port);
  write(dir_ / "remote.cfg", "template = integer\nprovider = remote\nendpoint = " + endpoint +
                                 "\ntimeout_ms = 300\nmax_retries = 0\n");
  Outcome o = decode("run --config " + path("remote.cfg") + " --tasks " + path("tasks.jsonl") + " --out " + path("out"));
  EXPECT_EQ(o.code, 2);
  auto rows = slurp(dir_ / "out" / "report.jsonl");
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 3);
  EXPECT_NE(rows.find("provider unavailable"), std::string::npos);
  EXPECT_EQ(decode("vocab fetch --endpoint " + endpoint + " --timeout-ms 300").code, 2);
  EXPECT_EQ(decode("vocab fetch --endpoint ftp://nowhere").code, 1);
}

}  // namespace
}  // namespace sufcon
