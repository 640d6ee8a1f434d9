#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "e7forge/pipeline.hpp"

using namespace e7forge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("e7forge_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string fixture(const std::string& rel) {
  return std::string(E7FORGE_SOURCE_DIR) + "/fixtures/" + rel;
}

std::string write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  return path.string();
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("pipeline: split fixture short run exits 0") {
  auto dir = temp_dir("split_short");
  PipelineConfig cfg;
  cfg.labeling_path = fixture("split.json");
  cfg.commands = {"validate", "build", "verify-killing", "grade:Q"};
  cfg.output_dir = (dir / "out").string();
  auto result = run_pipeline(cfg);
  CHECK(result.exit_code == 0);
  CHECK(result.summary["dim"] == 133);
  CHECK(result.summary["killing"] == "nondegenerate");
  CHECK(result.summary["grade"] == nlohmann::json::array({1, 32, 67, 32, 1}));
  // one report per command plus the summary
  CHECK(result.report_files.size() == 5);
  for (const auto& f : result.report_files) {
    auto j = read_json(f);
    CHECK(j.contains("meta"));
    if (j.contains("seed")) CHECK(j["seed"] == cfg.seed);
  }
}

TEST_CASE("pipeline: violating labeling exits 1 and names the line") {
  auto dir = temp_dir("bad_labeling");
  auto bad = labeling_to_json(split_labeling());
  bad["class_rank"] = 1;
  for (auto& [name, pt] : bad["points"].items()) pt["class"] = {0};
  bad["points"]["Q1"]["class"] = {1};
  bad["points"]["Q1"]["symbol"] = {"-1", "-1"};
  bad["points"]["Q1"]["split"] = false;
  auto path = write_json(dir / "bad.json", bad);
  PipelineConfig cfg;
  cfg.labeling_path = path;
  cfg.commands = {"validate", "build"};
  cfg.output_dir = (dir / "out").string();
  auto result = run_pipeline(cfg);
  CHECK(result.exit_code == 1);
  auto rep = read_json(fs::path(cfg.output_dir) / "1_validate.json");
  CHECK(rep["status"] == "rejected");
  bool names_line = false;
  for (const auto& v : rep["violations"])
    if (v["code"] == "line-class-sum" &&
        v["subject"].get<std::string>().find("Q1") != std::string::npos)
      names_line = true;
  CHECK(names_line);
}

TEST_CASE("pipeline: dependency order and unknown commands are config errors") {
  auto dir = temp_dir("dep_order");
  PipelineConfig cfg;
  cfg.labeling_path = fixture("split.json");
  cfg.output_dir = (dir / "out").string();
  cfg.commands = {"validate", "lts"};
  CHECK(run_pipeline(cfg).exit_code == 1);
  cfg.commands = {"validate", "grade:Q"};
  CHECK(run_pipeline(cfg).exit_code == 1);
  cfg.commands = {"validate", "frobnicate"};
  CHECK(run_pipeline(cfg).exit_code == 1);
  cfg.commands = {"verify-jacobi"};
  CHECK(run_pipeline(cfg).exit_code == 1);
}

TEST_CASE("pipeline: missing or malformed labeling exits 1") {
  auto dir = temp_dir("missing");
  PipelineConfig cfg;
  cfg.labeling_path = (dir / "nope.json").string();
  cfg.commands = {"validate"};
  cfg.output_dir = (dir / "out").string();
  CHECK(run_pipeline(cfg).exit_code == 1);
  std::ofstream(dir / "garbage.json") << "{\"class_rank\": 0}\n";
  cfg.labeling_path = (dir / "garbage.json").string();
  CHECK(run_pipeline(cfg).exit_code == 1);
}

TEST_CASE("golden: byte-stable across runs, reload passes jacobi, corruption rejected") {
  auto dir = temp_dir("golden");
  PipelineConfig cfg;
  cfg.labeling_path = fixture("split.json");
  emit_golden_file(cfg, (dir / "g1.json").string());
  emit_golden_file(cfg, (dir / "g2.json").string());
  CHECK(read_bytes(dir / "g1.json") == read_bytes(dir / "g2.json"));

  auto loaded = golden_from_json(read_json(dir / "g1.json"));
  CHECK(loaded.algebra.dim == 133);
  CHECK(jacobi_check_full(loaded.algebra).pass);  // no re-solve needed

  auto corrupt = read_json(dir / "g1.json");
  corrupt["algebra"]["c"].push_back({1, 0, 2, "12345"});  // breaks antisymmetry
  CHECK_THROWS_AS(golden_from_json(corrupt), IoError);
}

TEST_CASE("reports are byte-identical across runs up to the meta block") {
  auto dir = temp_dir("determinism");
  PipelineConfig cfg;
  cfg.labeling_path = fixture("hamilton.json");
  cfg.commands = {"validate", "build", "grade:Q"};
  cfg.seed = 777;
  cfg.output_dir = (dir / "a").string();
  auto r1 = run_pipeline(cfg);
  cfg.output_dir = (dir / "b").string();
  auto r2 = run_pipeline(cfg);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  REQUIRE(r1.report_files.size() == r2.report_files.size());
  for (std::size_t i = 0; i < r1.report_files.size(); ++i) {
    auto ja = read_json(r1.report_files[i]);
    auto jb = read_json(r2.report_files[i]);
    ja.erase("meta");
    jb.erase("meta");
    CHECK(ja.dump() == jb.dump());
  }
}

TEST_CASE("cli binary: run and golden subcommands") {
  auto dir = temp_dir("cli");
  nlohmann::json cfg;
  cfg["labeling_path"] = fixture("split.json");
  cfg["commands"] = {"validate"};
  cfg["output_dir"] = (dir / "out").string();
  auto cfg_path = write_json(dir / "config.json", cfg);

  std::string cmd = std::string(E7FORGE_CLI_PATH) + " run --config " + cfg_path + " > " +
                    (dir / "stdout.txt").string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  CHECK(rc == 0);
  auto out = read_bytes(dir / "stdout.txt");
  CHECK(out.find("\"validate\": \"accepted\"") != std::string::npos);

  std::string bad = std::string(E7FORGE_CLI_PATH) + " run --config " + (dir / "nope.json").string() +
                    " > /dev/null 2>&1";
  int rc_bad = std::system(bad.c_str());
  CHECK(WEXITSTATUS(rc_bad) == 1);
}

TEST_CASE("pipeline: full split run produces the expected summary") {
  auto dir = temp_dir("split_full");
  PipelineConfig cfg;
  cfg.labeling_path = fixture("split.json");
  cfg.commands = {"validate",  "build", "verify-jacobi", "verify-killing", "verify-roots",
                  "grade:Q",   "lts",   "gift",          "formula-star",   "d6a1"};
  cfg.output_dir = (dir / "out").string();
  auto result = run_pipeline(cfg);
  CHECK(result.exit_code == 0);
  CHECK(result.summary["dim"] == 133);
  CHECK(result.summary["roots"] == 126);
  CHECK(result.summary["type"] == "E7");
  CHECK(result.summary["formula_star"] == "exact");
  CHECK(result.summary["jacobi"] == "exact");
  CHECK(result.summary["lts"] == "pass");
  CHECK(result.summary["gift"] == "pass");
  CHECK(result.summary["d6a1"] == "pass");
}

TEST_CASE("pipeline: hamilton with base change identifies E7") {
  auto dir = temp_dir("hamilton_bc");
  PipelineConfig cfg;
  cfg.labeling_path = fixture("hamilton.json");
  cfg.commands = {"validate", "build", "base-change:-1", "verify-roots"};
  cfg.output_dir = (dir / "out").string();
  auto result = run_pipeline(cfg);
  CHECK(result.exit_code == 0);
  CHECK(result.summary["type"] == "E7");
  CHECK(result.summary["roots"] == 126);
  CHECK(result.summary["base_change_d"] == -1);
}

TEST_CASE("pipeline: verify-roots on the twisted form without base change fails mathematically") {
  auto dir = temp_dir("hamilton_noext");
  PipelineConfig cfg;
  cfg.labeling_path = fixture("hamilton.json");
  cfg.commands = {"validate", "build", "verify-roots", "verify-killing"};
  cfg.output_dir = (dir / "out").string();
  auto result = run_pipeline(cfg);
  CHECK(result.exit_code == 2);  // the seven matrix-unit h's do not exist over Q
  auto rep = read_json(fs::path(cfg.output_dir) / "3_verify-roots.json");
  CHECK(rep["status"] == "fail");
  // the later command is reported as explicitly skipped
  auto skipped = read_json(fs::path(cfg.output_dir) / "4_verify-killing.json");
  CHECK(skipped["status"] == "skipped");
}

TEST_CASE("pipeline: base-change rejects square or non-square-free parameters") {
  auto dir = temp_dir("bad_d");
  PipelineConfig cfg;
  cfg.labeling_path = fixture("split.json");
  cfg.output_dir = (dir / "out").string();
  cfg.commands = {"validate", "build", "base-change:4"};
  CHECK(run_pipeline(cfg).exit_code == 1);
  cfg.commands = {"validate", "build", "base-change:12"};
  CHECK(run_pipeline(cfg).exit_code == 1);
}

TEST_CASE("pipeline: prime_count controls the certificate pool") {
  auto dir = temp_dir("prime_count");
  PipelineConfig cfg;
  cfg.labeling_path = fixture("split.json");
  cfg.commands = {"validate", "build", "verify-killing"};
  cfg.prime_count = 3;
  cfg.output_dir = (dir / "out").string();
  auto result = run_pipeline(cfg);
  CHECK(result.exit_code == 0);
  CHECK(result.summary["primes"].size() == 3);
  auto rep = read_json(fs::path(cfg.output_dir) / "3_verify-killing.json");
  std::uint64_t used = rep["certificate_prime"].get<std::uint64_t>();
  bool in_pool = false;
  for (const auto& p : result.summary["primes"]) in_pool |= p.get<std::uint64_t>() == used;
  CHECK(in_pool);
}
