#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "pstyle/util.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBinary = PSTYLE_CLI_PATH;

int run(const std::string& args) {
  int status = std::system((kBinary + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string scratch() {
  auto dir = fs::temp_directory_path() / ("pstyle_cli_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("cli end to end") {
  auto dir = scratch();
  REQUIRE(run("gen-synthetic --out " + dir + "/corpus --seed 3 --anaclitic 12 --introjective 8") == 0);
  pstyle::write_file(dir + "/exp.conf",
                     "include = corpus/corpus.conf\nfeature_set = liwc, questionnaire\nmodel = lr\n"
                     "balance = none, smote\nrepetitions = 3\n");
  REQUIRE(run("evaluate -c " + dir + "/exp.conf -o " + dir + "/a") == 0);
  REQUIRE(run("evaluate -c " + dir + "/exp.conf -o " + dir + "/b") == 0);
  for (const auto& entry : fs::recursive_directory_iterator(dir + "/a")) {
    // config.txt records the output directory itself.
    if (!entry.is_regular_file() || entry.path().filename() == "config.txt") continue;
    auto other = dir + "/b/" + fs::relative(entry.path(), dir + "/a").string();
    CAPTURE(other);
    CHECK(pstyle::read_file(entry.path().string()) == pstyle::read_file(other));
  }
  CHECK(run("compare " + dir + "/a/runs/liwc__lr__none.jsonl " + dir + "/a/runs/liwc__lr__smote.jsonl") == 0);
  CHECK(run("compare --paired-balance -o " + dir + "/cmp " + dir + "/a/runs/liwc__lr__none.jsonl " + dir +
            "/a/runs/liwc__lr__smote.jsonl") == 0);
  CHECK(fs::exists(dir + "/cmp/comparison.md"));
  CHECK(run("analyze -c " + dir + "/exp.conf -o " + dir + "/an --set svg=true") == 0);
  CHECK(fs::exists(dir + "/an/analysis/liwc_boxplots.svg"));

  SUBCASE("exit codes") {
    CHECK(run("defaults") == 0);
    CHECK(run("evaluate -c " + dir + "/exp.conf --set model=svm -o " + dir + "/c") == 2);
    CHECK(run("evaluate -c " + dir + "/exp.conf --set lexicon= -o " + dir + "/d") == 2);
    CHECK(run("evaluate -c " + dir + "/missing.conf") == 2);
    CHECK(run("nonsense") == 2);
    pstyle::write_file(dir + "/corpus/transcripts/P999.json", "{ not json");
    CHECK(run("evaluate -c " + dir + "/exp.conf -o " + dir + "/e") == 3);
    fs::remove(dir + "/corpus/transcripts/P999.json");
    std::string labels = "patient_id,label\n";
    for (const auto& entry : fs::directory_iterator(dir + "/corpus/transcripts")) {
      labels += entry.path().stem().string() + ",anaclitic\n";
    }
    pstyle::write_file(dir + "/one_class.csv", labels);
    CHECK(run("evaluate -c " + dir + "/exp.conf --set labels_csv=" + dir + "/one_class.csv -o " + dir + "/f") == 4);
  }
  fs::remove_all(dir);
}
