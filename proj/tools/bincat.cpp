#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bincat/kernels.hpp"
#include "bincat/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Random walk with binomial catastrophes: numerical experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(BINCAT_VERSION));

  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string kernels;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON experiment config")->required();
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Base seed (overrides the config)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--kernels", kernels, "Vector kernels: scalar or avx2")
        ->check(CLI::IsMember({"scalar", "avx2"}));
  };

  CLI::App* run_cmd = app.add_subcommand("run", "Run the experiment named in the config");
  add_common(run_cmd);
  for (const std::string& name : bincat::experiment_names()) {
    add_common(app.add_subcommand(name, "Run the " + name + " experiment"));
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  bincat::RunOptions options;
  if (chosen != run_cmd) options.experiment = chosen->get_name();
  if (chosen->count("--seed") > 0) options.seed = seed;
  options.threads = threads;
  if (!kernels.empty()) {
    try {
      bincat::kernels::set_backend(kernels == "avx2" ? bincat::kernels::Backend::avx2
                                                       : bincat::kernels::Backend::scalar);
    } catch (const std::exception& e) {
      std::cerr << "invalid option: " << e.what() << '\n';
      return 1;
    }
  }
  return bincat::run(config, out, options, std::cerr);
}
