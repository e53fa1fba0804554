#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "icl/runner.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::string cache_dir;
  std::string endpoint;
  int parallelism = 0;
  bool mock = false;
  bool live = false;
};

void add_common(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("-c,--config", opts->config_path, "run configuration file (JSON)")->required();
  cmd->add_option("--out-dir", opts->out_dir, "override the config's out_dir");
  cmd->add_option("--cache-dir", opts->cache_dir, "override the config's cache_dir");
  cmd->add_option("--endpoint", opts->endpoint, "override every model's endpoint URL");
  cmd->add_option("--parallelism", opts->parallelism, "override the request parallelism bound");
  cmd->add_flag("--mock", opts->mock, "force every model to the offline mock");
  cmd->add_flag("--live", opts->live, "allow calls to live endpoints");
}

icl::RunConfig resolve(const CommonOptions& opts) {
  icl::RunConfig config = icl::load_config(opts.config_path);
  if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
  if (!opts.cache_dir.empty()) config.cache_dir = opts.cache_dir;
  if (opts.parallelism > 0) config.parallelism = opts.parallelism;
  for (icl::ModelSpec& model : config.models) {
    if (opts.mock) {
      model.mock = true;
    }
    if (!opts.endpoint.empty()) model.endpoint = opts.endpoint;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formal-language in-context learning harness"};
  app.require_subcommand(1);

  CommonOptions opts;
  CLI::App* generate = app.add_subcommand("generate", "build train/test suites");
  CLI::App* render = app.add_subcommand("render", "dump sample prompt bundles");
  CLI::App* run = app.add_subcommand("run", "run the model grid and record outputs");
  CLI::App* baseline = app.add_subcommand("baseline", "train and score the classical baselines");
  CLI::App* analyze = app.add_subcommand("analyze", "score run records into report tables");
  CLI::App* verify = app.add_subcommand("verify", "audit generated artifacts against references");
  for (CLI::App* cmd : {generate, render, run, baseline, analyze, verify}) {
    add_common(cmd, &opts);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    icl::RunConfig config = resolve(opts);
    if (generate->parsed()) {
      icl::cmd_generate(config);
    } else if (render->parsed()) {
      icl::cmd_render(config);
    } else if (run->parsed()) {
      icl::cmd_run(config, opts.live);
    } else if (baseline->parsed()) {
      icl::cmd_baseline(config);
    } else if (analyze->parsed()) {
      icl::cmd_analyze(config);
    } else if (verify->parsed()) {
      int failures = icl::cmd_verify(config);
      if (failures > 0) {
        std::cerr << failures << " verification checks failed\n";
        return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
