#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include <CLI11.hpp>

#include "lcft/cli.hpp"

namespace fs = std::filesystem;
using namespace lcft;

namespace {

struct RunFlags {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out = ".";
  bool parallel = false;
};

// 0 pass, 2 property failure, 1 error
int run_one(const std::string& path, const RunFlags& f) {
  try {
    const cli::Scenario s = cli::make_scenario(cli::load_config(path), f.seed);
    const cli::Outcome o = cli::run_scenario(s, f.threads);
    const std::string stem = s.output.empty() ? fs::path(path).stem().string() : s.output;
    fs::create_directories(f.out);
    const fs::path json_path = fs::path(f.out) / (stem + ".json");
    std::ofstream(json_path) << o.report.dump(2) << '\n';
    if (!o.csv.empty()) std::ofstream(fs::path(f.out) / (stem + ".csv")) << o.csv;
    std::cout << path << ": " << (o.pass ? "pass" : "FAIL") << " -> " << json_path.string() << '\n';
    return o.pass ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << path << ": error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonisotropic geometry of lineally convex finite-type domains: scenario runner"};
  app.require_subcommand(1);
  RunFlags flags;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run scenario configs (TOML or JSON)");
  run->add_option("configs", flags.configs, "Config files")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--threads", flags.threads, "Threads per experiment")->check(CLI::PositiveNumber);
  run->add_option("--out", flags.out, "Output directory for reports");
  run->add_flag("--parallel", flags.parallel, "Run independent scenarios concurrently");

  app.add_subcommand("list-domains", "List built-in domains");
  app.add_subcommand("schema", "Print the report JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (app.got_subcommand("list-domains")) {
    std::cout << cli::list_domains().dump(2) << '\n';
    return 0;
  }
  if (app.got_subcommand("schema")) {
    std::cout << cli::report_schema().dump(2) << '\n';
    return 0;
  }
  if (*seed_opt) flags.seed = seed;
  std::vector<int> codes;
  if (flags.parallel) {
    std::vector<std::future<int>> jobs;
    for (const auto& c : flags.configs) jobs.push_back(std::async(std::launch::async, run_one, c, flags));
    for (auto& j : jobs) codes.push_back(j.get());
  } else {
    for (const auto& c : flags.configs) codes.push_back(run_one(c, flags));
  }
  int status = 0;
  for (int c : codes) status = c == 1 ? 1 : std::max(status, c);
  return status;
}
