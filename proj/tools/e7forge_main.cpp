#include "CLI11.hpp"

#include <iostream>

#include "e7forge/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"e7forge: exact construction and verification of Lie algebras of type E7"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string out_file;
  std::uint64_t seed = 0;
  int primes = 0;

  auto* run = app.add_subcommand("run", "run a verification pipeline from a config file");
  run->add_option("--config", config_path, "pipeline config JSON")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--primes", primes, "override the config prime count");
  run->add_option("--out", out_dir, "override the config output directory");

  auto* golden = app.add_subcommand("golden", "emit the golden structure-constant file");
  golden->add_option("--config", config_path, "pipeline config JSON")->required();
  golden->add_option("--out", out_file, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config " << config_path << "\n";
      return 1;
    }
    nlohmann::json j;
    in >> j;
    auto cfg = e7forge::pipeline_config_from_json(j);
    if (run->parsed()) {
      if (run->count("--seed")) cfg.seed = seed;
      if (run->count("--primes")) cfg.prime_count = primes;
      if (run->count("--out")) cfg.output_dir = out_dir;
      auto result = e7forge::run_pipeline(cfg);
      std::cout << result.summary.dump(2) << "\n";
      return result.exit_code;
    }
    return e7forge::emit_golden_file(cfg, out_file);
  } catch (const e7forge::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
