// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cafm/cli.hpp"
#include "cafm/document.hpp"

using namespace cafm;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cafm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return std::string(CAFM_FIXTURES) + "/" + name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("check examples") {
  auto r = cli({"check", fixture("ecall.json"), "--analysis", "voidness", "--approach", "forall", "--output", "json"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("verdict") == "not-void");

  r = cli({"check", fixture("contradiction.json"), "--analysis", "voidness", "--approach", "iterative"});
  CHECK(r.code == 1);
  CHECK(r.out.find("witness context: {c}") != std::string::npos);

  r = cli({"check", fixture("ecall.json"), "--analysis", "false-optional", "--approach", "oracle", "--output",
           "json"});
  CHECK(r.code == 1);
  CHECK(nlohmann::json::parse(r.out).at("features") == nlohmann::json::array({"eCall"}));
}

TEST_CASE("check variants") {
  for (const char* a : {"iterative", "forall", "pruning", "portfolio"}) {
    auto r = cli({"check", fixture("ecall.json"), "--analysis", "all-features", "--approach", a});
    CHECK(r.code == 1);
    CHECK(r.out.find("false-optional: {eCall}") != std::string::npos);
  }
  auto r = cli({"check", fixture("ecall_fm.json"), "--analysis", "redundancy", "--candidate-index", "0"});
  CHECK(r.code == 0);
  r = cli({"check", fixture("ecall_fm.json"), "--analysis", "redundancy", "--candidate", "eCallRussia -> !GPS"});
  CHECK(r.code == 1);
  r = cli({"check", fixture("ecall.json"), "--analysis", "dead", "--stop-at-first", "--timeout-secs", "30"});
  CHECK(r.code == 0);
}

TEST_CASE("check errors exit 2") {
  CHECK(cli({"check", "/nonexistent.json"}).code == 2);
  CHECK(cli({"check", fixture("ecall.json"), "--approach", "pruning"}).code == 2);
  CHECK(cli({"check", fixture("ecall.json"), "--analysis", "nonsense"}).code == 2);
  CHECK(cli({"check", fixture("ecall.json"), "--analysis", "redundancy", "--candidate-index", "99"}).code == 2);
  auto bad = std::filesystem::temp_directory_path() / "cafm_bad.json";
  std::ofstream(bad) << R"({"contexts": [], "features": ["a"], "formula": "a & ("})";
  auto r = cli({"check", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 1") != std::string::npos);
  std::filesystem::remove(bad);
  CHECK(cli({}).code == 2);
}

TEST_CASE("dump CNF") {
  auto path = std::filesystem::temp_directory_path() / "cafm_dump.cnf";
  CHECK(cli({"check", fixture("ecall.json"), "--dump-cnf", path.string()}).code == 0);
  std::string text = slurp(path);
  CHECK(text.find("c var 1 Location") != std::string::npos);
  CHECK(text.find("p cnf ") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("generate") {
  auto dir = std::filesystem::temp_directory_path() / "cafm_gen_test";
  std::filesystem::create_directories(dir);
  auto a = dir / "a.json", b = dir / "b.json";
  auto r = cli({"generate", "--features", "250", "--contexts", "10", "--ratio", "5.5", "--seed", "7", "-o",
                a.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("clauses drawn: 1375") != std::string::npos);
  CHECK(read_document(a).metadata.at("clauses_drawn") == 1375);
  cli({"generate", "--features", "250", "--contexts", "10", "--ratio", "5.5", "--seed", "7", "-o", b.string()});
  CHECK(slurp(a) == slurp(b));
  CHECK(cli({"generate", "--features", "1", "--contexts", "1", "--ratio", "3"}).code == 2);
  CHECK(cli({"generate", "--features", "5", "--contexts", "1", "--ratio", "3", "--distribution", "zipf"}).code == 2);
  auto s = cli({"generate", "--features", "5", "--contexts", "1", "--ratio", "1"});
  CHECK(s.code == 0);
  CHECK(nlohmann::json::parse(s.out).at("features").size() == 5);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bench") {
  auto dir = std::filesystem::temp_directory_path() / "cafm_bench_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "in");
  for (int i = 0; i < 3; ++i)
    CHECK(cli({"generate", "--features", "8", "--contexts", "2", "--ratio", "3", "--seed", std::to_string(i), "-o",
               (dir / "in" / ("g" + std::to_string(i) + ".json")).string()})
              .code == 0);
  auto csv = dir / "rows.csv", summary = dir / "summary.json";
  auto r = cli({"bench", (dir / "in").string(), "--analyses", "voidness,all-features", "--approaches",
                "iterative,forall,pruning", "--repetitions", "2", "--timeout-secs", "20", "--csv", csv.string(),
                "--summary", summary.string()});
  CHECK(r.code == 0);
  std::string rows = slurp(csv);
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 1 + 3 * (2 + 3) * 2);
  CHECK(nlohmann::json::parse(slurp(summary)).at("disagreements").empty());
  CHECK(r.out.find("Best approach counts: all-features") != std::string::npos);
  CHECK(cli({"bench", (dir / "missing").string()}).code == 2);
  std::filesystem::remove_all(dir);
}
