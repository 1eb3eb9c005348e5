#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "varalpha/config.hpp"
#include "varalpha/experiments.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("VARALPHA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    std::cerr << "warning: ignoring malformed VARALPHA_THREADS='" << env
              << "'\n";
  }
  return 0;  // 0 = leave the config value alone
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"varalpha: semi-Markov diffusion with position-dependent "
               "waiting-time order"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;

  for (const std::string& name : varalpha::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "worker thread count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "override the output directory");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();
  CLI::App* sub = app.get_subcommands().front();

  try {
    varalpha::Config cfg = varalpha::Config::from_file(config_path);
    if (sub->count("--seed")) cfg.set("seed", std::to_string(seed));
    if (sub->count("--threads"))
      cfg.set("threads", std::to_string(threads));
    else if (const int env_threads = default_threads(); env_threads > 0 && !cfg.has("threads"))
      cfg.set("threads", std::to_string(env_threads));
    if (sub->count("--out")) cfg.set("output.dir", out);

    return varalpha::run_experiment(experiment, cfg, std::cout);
  } catch (const varalpha::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return varalpha::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error (" << experiment << "): " << e.what() << "\n";
    return varalpha::kExitError;
  }
}
