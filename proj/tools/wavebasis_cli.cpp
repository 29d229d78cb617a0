// Command-line front end: run, grid-search, export-vf, eval-frozen.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "wavebasis/harness.hpp"

namespace {

using namespace wavebasis;

struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "key = value file supplying defaults")->check(CLI::ExistingFile);
    for (const auto& key : config_keys()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      app.add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; },
                                           "overrides '" + key + "'");
    }
  }

  ExperimentConfig build() const {
    ExperimentConfig config;
    if (!config_file.empty()) config = load_config_file(config_file);
    for (const auto& [key, value] : values) apply_setting(config, key, value);
    config.validate();
    return config;
  }
};

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    out.push_back(std::stod(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

BasisSet load_basis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open basis file " + path);
  return read_basis(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet-basis Sarsa(lambda) experiments"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* run = app.add_subcommand("run", "run every seed of one configuration");
  ConfigFlags run_flags;
  run_flags.attach(*run);
  bool dump_relevance = false;
  run->add_flag("--dump-relevance", dump_relevance, "write per-episode relevance statistics");

  auto* grid = app.add_subcommand("grid-search", "select alpha by final-window mean return");
  ConfigFlags grid_flags;
  grid_flags.attach(*grid);
  std::string alphas = "0.0005,0.001,0.005,0.01,0.05,0.1";
  grid->add_option("--alphas", alphas, "comma-separated candidates")->capture_default_str();

  auto* export_vf = app.add_subcommand("export-vf", "write -max_a Q over a 2-D lattice");
  std::string basis_path, out_path, env_name = "mountain-car";
  int resolution = 50, x_dim = 0, y_dim = 1;
  export_vf->add_option("--basis", basis_path, "basis file written by 'run'")->required();
  export_vf->add_option("--env", env_name)->capture_default_str();
  export_vf->add_option("--resolution", resolution)->capture_default_str();
  export_vf->add_option("--x-dim", x_dim)->capture_default_str();
  export_vf->add_option("--y-dim", y_dim)->capture_default_str();
  export_vf->add_option("--out", out_path, "output CSV")->required();

  auto* eval = app.add_subcommand("eval-frozen", "greedy rollouts of a fixed value function");
  std::string eval_basis, eval_env = "mountain-car", eval_seeds = "0-9";
  int eval_episodes = 100;
  std::uint64_t eval_cap = 2000;
  eval->add_option("--basis", eval_basis)->required();
  eval->add_option("--env", eval_env)->capture_default_str();
  eval->add_option("--episodes", eval_episodes)->capture_default_str();
  eval->add_option("--seeds", eval_seeds)->capture_default_str();
  eval->add_option("--step-cap", eval_cap)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    RunOptions options;
    options.threads = threads;
    if (run->parsed()) {
      options.dump_relevance = dump_relevance;
      const ExperimentResult r = run_experiment(run_flags.build(), options);
      double final_mean = 0.0;
      for (const auto& s : r.runs) final_mean += final_window_mean(s, r.config.selection_window);
      final_mean /= static_cast<double>(r.runs.size());
      std::printf("%s\nfinal-%d mean return %.3f over %zu seeds\n", r.directory.string().c_str(),
                  r.config.selection_window, final_mean, r.runs.size());
    } else if (grid->parsed()) {
      const GridSearchResult g = grid_search_alpha(grid_flags.build(), parse_alphas(alphas), options);
      for (const auto& row : g.rows) std::printf("alpha %-10g score %.3f\n", row.alpha, row.score);
      std::printf("best alpha %g\n", g.best_alpha);
    } else if (export_vf->parsed()) {
      const BasisSet basis = load_basis(basis_path);
      export_value_function(basis, *make_environment(env_name), resolution, out_path,
                            nlohmann::json{{"basis_file", basis_path}}, x_dim, y_dim);
    } else if (eval->parsed()) {
      const BasisSet basis = load_basis(eval_basis);
      const auto seeds = parse_seed_list(eval_seeds);
      const FrozenEvaluation e = evaluate_frozen(basis, *make_environment(eval_env), eval_episodes, seeds, eval_cap);
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        std::printf("seed %llu mean %.3f\n", static_cast<unsigned long long>(seeds[i]), e.run_means[i]);
      }
      std::printf("mean %.3f std %.3f\n", e.mean, e.stddev);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wavebasis: %s\n", e.what());
    return 1;
  }
  return 0;
}
