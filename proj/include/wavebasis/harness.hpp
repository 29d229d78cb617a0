#ifndef WAVEBASIS_HARNESS_HPP
#define WAVEBASIS_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "wavebasis/config.hpp"

namespace wavebasis {

struct SeedRun {
  std::uint64_t seed = 0;
  std::size_t initial_size = 0;
  std::vector<EpisodeRecord> episodes;
  std::vector<EditRecord> edits;
  std::shared_ptr<const BasisSet> final_basis;
};

struct AggregateRow {
  int episode = 0;
  double mean_smoothed = 0.0;  ///< mean over seeds of the trailing-window average return
  double std_smoothed = 0.0;   ///< population standard deviation of the same
  double mean_return = 0.0;    ///< mean over seeds of the raw episode return
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SeedRun> runs;  ///< in config.seeds order
  std::vector<AggregateRow> aggregate;
  std::filesystem::path directory;  ///< empty when nothing was written
};

struct RunOptions {
  bool write_files = true;
  unsigned threads = 0;  ///< 0 = hardware concurrency
  bool dump_relevance = false;
};

AdaptiveMode adaptive_mode(Scheme scheme);

/// Starting basis for a scheme: coupled for bspline-coupled and awr,
/// decoupled for bspline-decoupled, ibfdd and mawb.
BasisSet make_initial_basis(const ExperimentConfig& config, const Environment& env);

/// One agent, one seed, all episodes. Writes nothing.
SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed);

/// Validates, runs every seed (in parallel), aggregates, and writes the
/// per-seed, edit-log, basis and aggregate files under run_directory().
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Mean of the last `window` values up to and including each position.
std::vector<double> trailing_average(std::span<const double> values, int window);

std::vector<AggregateRow> aggregate_runs(std::span<const SeedRun> runs, int window);

/// Mean return over the final `window` episodes (all of them if fewer).
double final_window_mean(const SeedRun& run, int window);

struct GridSearchRow {
  double alpha = 0.0;
  double score = 0.0;  ///< mean over seeds of final_window_mean
  std::vector<double> per_seed;
};

struct GridSearchResult {
  double best_alpha = 0.0;
  std::vector<GridSearchRow> rows;  ///< ascending alpha
  std::vector<ExperimentResult> results;
};

/// Picks the alpha maximizing the selection statistic; ties go to the
/// smaller alpha. Writes a grid-search table when options.write_files.
GridSearchResult grid_search_alpha(const ExperimentConfig& config, std::vector<double> alphas,
                                   const RunOptions& options = {});

struct ValueGrid {
  int resolution = 0;
  int x_dim = 0;
  int y_dim = 1;
  std::vector<double> coords;  ///< lattice coordinates i/(resolution-1)
  std::vector<double> values;  ///< -max_a Q, row-major with x varying fastest

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy * resolution + ix)]; }
};

/// Negated greedy value over a 2-D slice of the normalized state space.
/// Dimensions other than x_dim/y_dim are held at `fill`.
ValueGrid value_function_grid(const BasisSet& basis, int resolution, int x_dim = 0, int y_dim = 1,
                              double fill = 0.5);

void export_value_function(const BasisSet& basis, const Environment& env, int resolution,
                           const std::filesystem::path& path, const nlohmann::json& metadata = {},
                           int x_dim = 0, int y_dim = 1);

struct FrozenEvaluation {
  std::vector<double> run_means;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Greedy rollouts with learning disabled, one run per seed.
FrozenEvaluation evaluate_frozen(const BasisSet& basis, const Environment& env, int episodes,
                                 std::span<const std::uint64_t> seeds, std::uint64_t step_cap);

/// "# " followed by one JSON line carrying the config and its hash.
std::string metadata_line(const std::string& kind, const ExperimentConfig& config);

}  // namespace wavebasis

#endif
