#include "commands.hpp"
#include "output.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <vector>

int main(int argc, char** argv) {
  using namespace porehom::app;
  CLI::App app{"Multiscale phase-field flow in perforated domains"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  CommandOptions opts;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<CLI::Option*> seed_options;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--threads", opts.threads, "concurrent runs in a study")->check(CLI::PositiveNumber);
    seed_options.push_back(sub->add_option("--seed", seed, "seed for the random initial phase"));
    sub->add_flag("--timings", opts.timings, "record wall-clock times in reports");
  };
  std::string command;
  for (const char* name : {"cell", "micro", "macro", "study", "unfold"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " scenario");
    add_common(sub);
    sub->callback([&command, name] { command = name; });
  }
  auto* geometry = app.add_subcommand("geometry", "geometry utilities");
  geometry->require_subcommand(1);
  auto* dump = geometry->add_subcommand("dump", "write the pore mask as PGM/CSV with face counts");
  add_common(dump);
  dump->callback([&command] { command = "geometry dump"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }
  if (!out.empty()) opts.out_dir = out;
  for (auto* o : seed_options)
    if (o->count()) opts.seed = seed;
  return run_command(command, opts, std::cerr);
}
