#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aqec/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"aqec: autonomous QEC experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment spec");
  std::string spec_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  run->add_option("--spec", spec_path, "Experiment spec (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the spec)");
  run->add_option("--seed", seed, "Master seed (overrides the spec)");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list", "List experiment kinds");
  bool as_json = false;
  list->add_flag("--json", as_json, "Print the catalog as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    nlohmann::json cat = nlohmann::json::array();
    for (const auto& e : aqec::exp::list_experiments()) {
      if (as_json) {
        cat.push_back({{"kind", e.name}, {"figure", e.figure}, {"description", e.description},
                       {"parameters", e.parameters}});
      } else {
        std::cout << e.name << "  [" << e.figure << "]  " << e.description << '\n';
      }
    }
    if (as_json) std::cout << cat.dump(2) << '\n';
    return 0;
  }

  try {
    const auto spec = aqec::exp::load_spec(spec_path);
    aqec::exp::RunOptions opts;
    if (out_dir) opts.out_dir = *out_dir;
    opts.seed = seed;
    opts.threads = threads;
    const auto report = aqec::exp::run(spec, opts);
    std::cout << report.manifest.dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cout << aqec::exp::error_json(e).dump() << '\n';
    return aqec::exp::exit_code_for(e);
  }
}
