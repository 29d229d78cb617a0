#include "wavebasis/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace wavebasis {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_ids(const std::vector<FeatureId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? ";" : "") + std::to_string(ids[i]);
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double sq = 0.0;
  for (double x : v) sq += (x - m) * (x - m);
  return std::sqrt(sq / static_cast<double>(v.size()));
}

struct RelevanceDump {
  std::ostringstream rows;
};

SeedRun run_seed_impl(const ExperimentConfig& config, std::uint64_t seed, RelevanceDump* dump) {
  const auto env = make_environment(config.env);
  BasisSet basis = make_initial_basis(config, *env);
  const AdaptiveMode mode = adaptive_mode(config.scheme);
  std::unique_ptr<AdaptiveController> controller;
  if (mode != AdaptiveMode::none) controller = std::make_unique<AdaptiveController>(mode, config.adaptive);

  AgentConfig agent = config.agent;
  agent.seed = seed;
  Rng rng(seed);

  SeedRun run;
  run.seed = seed;
  run.initial_size = basis.size();
  run.episodes.reserve(static_cast<std::size_t>(config.episodes));

  EpisodeOptions opts;
  opts.step_cap = config.step_cap;
  opts.on_edit = [&run](const EditRecord& e) { run.edits.push_back(e); };

  std::uint64_t global_step = 0;
  std::uint64_t total_edits = 0;
  for (int ep = 0; ep < config.episodes; ++ep) {
    opts.episode = ep;
    EpisodeRecord rec = run_episode(*env, basis, controller.get(), agent, rng, global_step, opts);
    total_edits += rec.edits;
    rec.edits = total_edits;  // cumulative in the record series
    run.episodes.push_back(rec);

    if (dump && controller) {
      for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto it = controller->relevance().find(basis.id_at(i));
        if (it == controller->relevance().end()) continue;
        const auto& s = it->second;
        const double eps = config.adaptive.eps;
        dump->rows << ep << ',' << basis.id_at(i) << ',' << s.samples << ',' << num(rho(s, eps)) << ','
                   << num(obs(s, eps)) << ',' << num(criterion(s, eps)) << '\n';
      }
    }
  }
  run.final_basis = std::make_shared<const BasisSet>(std::move(basis));
  return run;
}

void write_seed_files(const ExperimentConfig& config, const SeedRun& run, const std::filesystem::path& dir,
                      const RelevanceDump* dump) {
  const std::string s = std::to_string(run.seed);
  {
    auto out = open_output(dir / ("seed-" + s + ".csv"));
    out << metadata_line("episodes", config) << '\n';
    out << "seed,episode,return,steps,basis_size,edits\n";
    for (const auto& e : run.episodes) {
      out << run.seed << ',' << e.episode << ',' << num(e.total_return) << ',' << e.steps << ',' << e.basis_size
          << ',' << e.edits << '\n';
    }
  }
  if (adaptive_mode(config.scheme) != AdaptiveMode::none) {
    auto out = open_output(dir / ("edits-seed-" + s + ".csv"));
    out << metadata_line("edits", config) << '\n';
    out << "step,episode,kind,removed,added,score,basis_size\n";
    for (const auto& e : run.edits) {
      out << e.step << ',' << e.episode << ',' << to_string(e.kind) << ',' << join_ids(e.removed) << ','
          << join_ids(e.added) << ',' << num(e.score) << ',' << e.basis_size << '\n';
    }
  }
  if (dump) {
    auto out = open_output(dir / ("relevance-seed-" + s + ".csv"));
    out << metadata_line("relevance", config) << '\n';
    out << "episode,id,samples,rho,obs,criterion\n" << dump->rows.str();
  }
  auto out = open_output(dir / ("basis-seed-" + s + ".txt"));
  write_basis(out, *run.final_basis);
}

}  // namespace

std::string metadata_line(const std::string& kind, const ExperimentConfig& config) {
  nlohmann::json j;
  j["kind"] = kind;
  j["config_hash"] = config.hash_hex();
  j["config"] = config.to_json();
  j["config"].erase("output_dir");  // not part of the experiment's identity
  return "# " + j.dump();
}

AdaptiveMode adaptive_mode(Scheme scheme) {
  switch (scheme) {
    case Scheme::awr: return AdaptiveMode::awr;
    case Scheme::ibfdd: return AdaptiveMode::ibfdd;
    case Scheme::mawb: return AdaptiveMode::mawb;
    default: return AdaptiveMode::none;
  }
}

BasisSet make_initial_basis(const ExperimentConfig& config, const Environment& env) {
  const std::size_t actions = env.num_actions();
  switch (config.scheme) {
    case Scheme::bspline_coupled:
    case Scheme::awr:
      return build_fixed_coupled(env.dims(), config.order, config.scale, actions, config.size_cap);
    case Scheme::bspline_decoupled:
    case Scheme::ibfdd:
    case Scheme::mawb:
      return build_decoupled(env.dims(), config.order, config.scale, actions, config.size_cap);
    case Scheme::fourier:
      return build_fourier(env.dims(), config.fourier_order, actions, config.size_cap);
  }
  throw std::logic_error("unhandled scheme");
}

SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  return run_seed_impl(config, seed, nullptr);
}

std::vector<double> trailing_average(std::span<const double> values, int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= static_cast<std::size_t>(window)) sum -= values[i - static_cast<std::size_t>(window)];
    const std::size_t n = std::min(i + 1, static_cast<std::size_t>(window));
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

std::vector<AggregateRow> aggregate_runs(std::span<const SeedRun> runs, int window) {
  if (runs.empty()) return {};
  const std::size_t episodes = runs.front().episodes.size();
  std::vector<std::vector<double>> smoothed;
  for (const auto& r : runs) {
    if (r.episodes.size() != episodes) throw std::invalid_argument("runs differ in episode count");
    std::vector<double> returns;
    for (const auto& e : r.episodes) returns.push_back(e.total_return);
    smoothed.push_back(trailing_average(returns, window));
  }
  std::vector<AggregateRow> out(episodes);
  std::vector<double> column(runs.size()), raw(runs.size());
  for (std::size_t e = 0; e < episodes; ++e) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      column[r] = smoothed[r][e];
      raw[r] = runs[r].episodes[e].total_return;
    }
    out[e] = {static_cast<int>(e), mean_of(column), population_std(column), mean_of(raw)};
  }
  return out;
}

double final_window_mean(const SeedRun& run, int window) {
  const std::size_t n = run.episodes.size();
  const std::size_t take = std::min(n, static_cast<std::size_t>(std::max(window, 1)));
  double sum = 0.0;
  for (std::size_t i = n - take; i < n; ++i) sum += run.episodes[i].total_return;
  return take == 0 ? 0.0 : sum / static_cast<double>(take);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  if (options.write_files) {
    result.directory = run_directory(config);
    std::filesystem::create_directories(result.directory);
  }

  const std::size_t n = config.seeds.size();
  result.runs.resize(n);
  std::vector<RelevanceDump> dumps(options.dump_relevance ? n : 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        RelevanceDump* dump = options.dump_relevance ? &dumps[i] : nullptr;
        result.runs[i] = run_seed_impl(config, config.seeds[i], dump);
        if (options.write_files) write_seed_files(config, result.runs[i], result.directory, dump);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.aggregate = aggregate_runs(result.runs, config.curve_window);
  if (options.write_files) {
    auto out = open_output(result.directory / "aggregate.csv");
    out << metadata_line("aggregate", config) << '\n';
    out << "episode,mean_smoothed,std_smoothed,mean_return,seeds\n";
    for (const auto& row : result.aggregate) {
      out << row.episode << ',' << num(row.mean_smoothed) << ',' << num(row.std_smoothed) << ','
          << num(row.mean_return) << ',' << n << '\n';
    }
  }
  return result;
}

GridSearchResult grid_search_alpha(const ExperimentConfig& config, std::vector<double> alphas,
                                   const RunOptions& options) {
  if (alphas.empty()) throw std::invalid_argument("grid search needs at least one alpha");
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  GridSearchResult out;
  std::optional<double> best_score;
  for (double alpha : alphas) {
    ExperimentConfig c = config;
    c.agent.alpha = alpha;
    ExperimentResult r = run_experiment(c, options);
    GridSearchRow row;
    row.alpha = alpha;
    for (const auto& run : r.runs) row.per_seed.push_back(final_window_mean(run, config.selection_window));
    row.score = mean_of(row.per_seed);
    if (!best_score || row.score > *best_score) {
      best_score = row.score;
      out.best_alpha = alpha;
    }
    out.rows.push_back(std::move(row));
    out.results.push_back(std::move(r));
  }

  if (options.write_files) {
    const auto dir = output_root(config);
    std::filesystem::create_directories(dir);
    auto f = open_output(dir / (config.label() + "-" + config.hash_hex() + "-grid.csv"));
    f << metadata_line("grid-search", config) << '\n';
    f << "alpha,score,selected";
    for (auto s : config.seeds) f << ",seed_" << s;
    f << '\n';
    for (const auto& row : out.rows) {
      f << num(row.alpha) << ',' << num(row.score) << ',' << (row.alpha == out.best_alpha ? 1 : 0);
      for (double v : row.per_seed) f << ',' << num(v);
      f << '\n';
    }
  }
  return out;
}

ValueGrid value_function_grid(const BasisSet& basis, int resolution, int x_dim, int y_dim, double fill) {
  if (resolution < 2) throw std::invalid_argument("value-function resolution must be >= 2");
  if (x_dim < 0 || y_dim < 0 || x_dim >= basis.dims() || y_dim >= basis.dims() || x_dim == y_dim) {
    throw std::invalid_argument("invalid slice dimensions");
  }
  ValueGrid grid;
  grid.resolution = resolution;
  grid.x_dim = x_dim;
  grid.y_dim = y_dim;
  for (int i = 0; i < resolution; ++i) grid.coords.push_back(static_cast<double>(i) / (resolution - 1));
  std::vector<double> s(static_cast<std::size_t>(basis.dims()), fill);
  std::vector<ActiveFeature> active;
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      s[static_cast<std::size_t>(x_dim)] = grid.coords[static_cast<std::size_t>(ix)];
      s[static_cast<std::size_t>(y_dim)] = grid.coords[static_cast<std::size_t>(iy)];
      basis.active_features(s, active);
      double best = q_value(basis, active, 0);
      for (std::size_t a = 1; a < basis.num_actions(); ++a) best = std::max(best, q_value(basis, active, a));
      grid.values.push_back(-best);
    }
  }
  return grid;
}

void export_value_function(const BasisSet& basis, const Environment& env, int resolution,
                           const std::filesystem::path& path, const nlohmann::json& metadata, int x_dim,
                           int y_dim) {
  if (basis.dims() != env.dims()) throw std::invalid_argument("basis and environment dimensions differ");
  const ValueGrid grid = value_function_grid(basis, resolution, x_dim, y_dim);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto out = open_output(path);
  nlohmann::json header;
  header["kind"] = "value-function";
  header["env"] = env.name();
  header["resolution"] = resolution;
  header["x_dim"] = x_dim;
  header["y_dim"] = y_dim;
  header["basis_size"] = basis.size();
  if (!metadata.is_null()) header["run"] = metadata;
  out << "# " << header.dump() << '\n';
  out << "x,y,neg_value\n";
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      out << num(grid.coords[static_cast<std::size_t>(ix)]) << ',' << num(grid.coords[static_cast<std::size_t>(iy)])
          << ',' << num(grid.at(ix, iy)) << '\n';
    }
  }
}

FrozenEvaluation evaluate_frozen(const BasisSet& basis, const Environment& env, int episodes,
                                 std::span<const std::uint64_t> seeds, std::uint64_t step_cap) {
  if (episodes < 1) throw std::invalid_argument("need at least one episode");
  if (basis.dims() != env.dims()) throw std::invalid_argument("basis and environment dimensions differ");
  FrozenEvaluation out;
  AgentConfig greedy;
  greedy.epsilon_greedy = 0.0;
  EpisodeOptions opts;
  opts.step_cap = step_cap;
  opts.learn = false;
  for (std::uint64_t seed : seeds) {
    BasisSet frozen = basis;
    Rng rng(seed);
    std::uint64_t steps = 0;
    double sum = 0.0;
    for (int ep = 0; ep < episodes; ++ep) {
      opts.episode = ep;
      sum += run_episode(env, frozen, nullptr, greedy, rng, steps, opts).total_return;
    }
    out.run_means.push_back(sum / episodes);
  }
  out.mean = mean_of(out.run_means);
  out.stddev = population_std(out.run_means);
  return out;
}

}  // namespace wavebasis
