#include "doctest.h"

#include <fstream>
#include <sstream>

#include "botdetect/cli.hpp"
#include "botdetect/ensemble.hpp"
#include "botdetect/modelstore.hpp"
#include "helpers.hpp"

using namespace botdetect;
using botdetect::testing::TempDir;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// synth -> train -> everything else, inside one scratch directory.
struct Workspace {
  TempDir dir{"cli"};
  std::string config_path;
  std::string model_path;

  Workspace() {
    REQUIRE(run({"--seed", "5", "synth", "--out", dir.file("data"), "--n", "200"}) == 0);
    config_path = dir.file("config.json");
    std::string config = R"({
      "seed": 5,
      "workers": 1,
      "folds": 2,
      "created_at": "2026-08-08T00:00:00Z",
      "tfidf": {"max_vocab": 60, "min_df": 1},
      "learners": {
        "random_forest": {"n_estimators": 10},
        "gradient_boosting": {"n_estimators": 10},
        "ada_boost": {"n_estimators": 10}
      },
      "datasets": [)";
    bool first = true;
    for (const char* tag :
         {"twitter_v2", "reddit_pushshift", "instagram_crowdtangle"}) {
      const std::string manifest = dir.file("data." + std::string(tag) + ".manifest.json");
      if (std::ifstream(manifest).good()) {
        if (!first) config += ",";
        config += "\"data." + std::string(tag) + ".manifest.json\"";
        first = false;
      }
    }
    config += "]}";
    write_file(config_path, config);
    model_path = dir.file("model.txt");
    REQUIRE(run({"--config", config_path, "train", "--out", model_path}) == 0);
  }
};

}  // namespace

TEST_CASE("train then evaluate: the full pipeline stays processed at 100%") {
  Workspace ws;
  const std::string report_path = ws.dir.file("eval.csv");
  CHECK(run({"--config", ws.config_path, "--format", "delimited", "evaluate",
             "--model", ws.model_path, "--mode", "overall", "--out",
             report_path}) == 0);
  const auto report = slurp(report_path);
  CHECK(report.find("pct_processed") != std::string::npos);
  // Every dataset row reports 100% processed.
  std::istringstream lines(report);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto first_comma = line.find(',');
    const auto second = line.find(',', first_comma + 1);
    const auto third = line.find(',', second + 1);
    CHECK(line.substr(second + 1, third - second - 1) == "100");
  }
  CHECK(rows >= 2);
}

TEST_CASE("unknown flags exit 1 with a usage line") {
  CHECK(run({"--definitely-not-a-flag"}) == 1);
  CHECK(run({"predict"}) == 1);  // missing required options
}

TEST_CASE("predict on a corrupt model exits 2") {
  Workspace ws;
  const std::string broken = ws.dir.file("broken.txt");
  const auto bytes = slurp(ws.model_path);
  write_file(broken, bytes.substr(0, bytes.size() / 2));
  CHECK(run({"predict", "--model", broken, "--input",
             ws.dir.file("data.twitter_v2.ndjson"), "--platform", "custom",
             "--mapping", ws.dir.file("data.mapping.json")}) == 2);
}

TEST_CASE("missing input files exit 2") {
  CHECK(run({"predict", "--model", "/nonexistent/model.txt", "--input",
             "/nonexistent/data.ndjson"}) == 2);
}

TEST_CASE("predict writes one row per user") {
  Workspace ws;
  const std::string out = ws.dir.file("preds.csv");
  CHECK(run({"predict", "--model", ws.model_path, "--input",
             ws.dir.file("data.twitter_v2.ndjson"), "--platform", "custom",
             "--mapping", ws.dir.file("data.mapping.json"), "--out", out}) == 0);
  const auto text = slurp(out);
  CHECK(text.find("user_id,platform") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') > 10);
}

TEST_CASE("identical runs produce byte-identical artifacts") {
  Workspace ws;
  const std::string again = ws.dir.file("model2.txt");
  CHECK(run({"--config", ws.config_path, "train", "--out", again}) == 0);
  CHECK(slurp(ws.model_path) == slurp(again));

  const std::string out1 = ws.dir.file("imp1.csv"), out2 = ws.dir.file("imp2.csv");
  for (const auto& out : {out1, out2}) {
    CHECK(run({"--format", "delimited", "importance", "--model", ws.model_path,
               "--field", "username", "--out", out}) == 0);
  }
  CHECK(slurp(out1) == slurp(out2));
  CHECK(slurp(out1).find("rank,name,score") == 0);
}

TEST_CASE("compare-learners emits the full grid") {
  Workspace ws;
  const std::string out = ws.dir.file("grid.csv");
  CHECK(run({"--config", ws.config_path, "--format", "delimited",
             "compare-learners", "--out", out}) == 0);
  const auto text = slurp(out);
  CHECK(std::count(text.begin(), text.end(), '\n') == 21);  // header + 20 cells
}

TEST_CASE("build-chartable from a plain name list") {
  TempDir dir("chartable");
  write_file(dir.file("names.txt"), "anna\nbob\ncarol\n");
  const std::string table = dir.file("table.txt");
  CHECK(run({"build-chartable", "--input", dir.file("names.txt"), "--out", table}) == 0);
  const auto text = slurp(table);
  CHECK(text.find("botdetect-chartable v1") == 0);
}

TEST_CASE("inspect-model prints the header") {
  Workspace ws;
  CHECK(run({"inspect-model", "--model", ws.model_path}) == 0);
}
