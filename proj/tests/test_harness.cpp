#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wavebasis/harness.hpp"

using namespace wavebasis;
namespace fs = std::filesystem;

namespace {

struct TempRoot {
  fs::path path;
  explicit TempRoot(const std::string& tag) {
    path = fs::temp_directory_path() / ("wavebasis-test-" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
    ::unsetenv("WAVEBASIS_OUTPUT_ROOT");
  }
  ~TempRoot() { fs::remove_all(path); }
};

ExperimentConfig small_config(const fs::path& root) {
  ExperimentConfig c;
  c.env = "mountain-car";
  c.scheme = Scheme::bspline_coupled;
  c.order = 1;
  c.scale = 1;
  c.episodes = 5;
  c.step_cap = 300;
  c.seeds = {0, 1, 2};
  c.agent.alpha = 0.01;
  c.output_dir = root.string();
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool first_data = true;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) {
      if (header != nullptr) *header = line;
      continue;
    }
    if (first_data) {  // column names
      first_data = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("single seed, single episode") {
  TempRoot tmp("single");
  auto c = small_config(tmp.path);
  c.episodes = 1;
  c.seeds = {0};
  const auto result = run_experiment(c);
  REQUIRE(result.runs.size() == 1);
  CHECK(result.runs[0].episodes.size() == 1);
  CHECK(read_rows(result.directory / "seed-0.csv").size() == 1);
  CHECK(read_rows(result.directory / "aggregate.csv").size() == 1);
  CHECK(fs::exists(result.directory / "basis-seed-0.txt"));
  CHECK_FALSE(fs::exists(result.directory / "edits-seed-0.csv"));
}

TEST_CASE("fixed schemes keep their size") {
  TempRoot tmp("fixed");
  const auto c = small_config(tmp.path);
  const auto result = run_experiment(c);
  for (const auto& row : read_rows(result.directory / "seed-1.csv")) {
    CHECK(row[4] == "9");
    CHECK(row[5] == "0");
  }
  CHECK(result.runs[1].initial_size == 9);
}

TEST_CASE("reruns are byte-identical and paths are keyed by config") {
  TempRoot a("rerun-a"), b("rerun-b");
  auto c = small_config(a.path);
  c.scheme = Scheme::mawb;
  c.adaptive.tau_split = 0.5;
  c.adaptive.tau_combine = 0.2;
  c.adaptive.check_interval = 20;
  const auto first = run_experiment(c);
  c.output_dir = b.path.string();
  const auto second = run_experiment(c, {.threads = 1});
  CHECK(first.directory.filename() == second.directory.filename());
  for (const auto& entry : fs::directory_iterator(first.directory)) {
    const auto name = entry.path().filename();
    CHECK_MESSAGE(slurp(entry.path()) == slurp(second.directory / name), name);
  }

  std::string header;
  read_rows(first.directory / "seed-0.csv", &header);
  const auto meta = nlohmann::json::parse(header.substr(2));
  CHECK(meta["config_hash"] == c.hash_hex());
  CHECK(first.directory.filename().string().find(c.hash_hex()) != std::string::npos);

  auto other = c;
  other.agent.alpha = 0.02;
  CHECK(other.hash_hex() != c.hash_hex());
  CHECK(run_directory(other) != run_directory(c));
  auto moved = c;
  moved.output_dir = "elsewhere";
  CHECK(moved.hash_hex() == c.hash_hex());
}

TEST_CASE("aggregate matches a recomputation from per-seed files") {
  TempRoot tmp("aggregate");
  auto c = small_config(tmp.path);
  c.episodes = 30;
  c.curve_window = 4;
  const auto result = run_experiment(c);

  std::map<std::uint64_t, std::vector<double>> returns;
  for (auto seed : c.seeds)
    for (const auto& row : read_rows(result.directory / ("seed-" + std::to_string(seed) + ".csv")))
      returns[seed].push_back(std::stod(row[2]));

  const auto agg = read_rows(result.directory / "aggregate.csv");
  REQUIRE(agg.size() == 30);
  for (std::size_t e = 0; e < 30; ++e) {
    std::vector<double> smooth, raw;
    for (auto& [seed, r] : returns) {
      const std::size_t lo = e + 1 >= 4 ? e + 1 - 4 : 0;
      double s = 0;
      for (std::size_t k = lo; k <= e; ++k) s += r[k];
      smooth.push_back(s / static_cast<double>(e + 1 - lo));
      raw.push_back(r[e]);
    }
    double mean = 0, mean_raw = 0, var = 0;
    for (std::size_t i = 0; i < smooth.size(); ++i) {
      mean += smooth[i] / 3.0;
      mean_raw += raw[i] / 3.0;
    }
    for (double s : smooth) var += (s - mean) * (s - mean) / 3.0;
    CHECK(std::stod(agg[e][1]) == doctest::Approx(mean).epsilon(1e-12));
    CHECK(std::abs(std::stod(agg[e][2]) - std::sqrt(var)) < 1e-9);
    CHECK(std::stod(agg[e][3]) == doctest::Approx(mean_raw).epsilon(1e-12));
  }
}

TEST_CASE("trailing average and final window") {
  const std::vector<double> v{1, 2, 3, 4, 5};
  CHECK(trailing_average(v, 2) == std::vector<double>{1, 1.5, 2.5, 3.5, 4.5});
  CHECK(trailing_average(v, 10) == std::vector<double>{1, 1.5, 2, 2.5, 3});
  CHECK_THROWS(trailing_average(v, 0));
  SeedRun run;
  for (int i = 0; i < 5; ++i) run.episodes.push_back({i, v[static_cast<std::size_t>(i)], 1, 0, 1});
  CHECK(final_window_mean(run, 2) == 4.5);
  CHECK(final_window_mean(run, 100) == 3.0);
}

TEST_CASE("alpha grid search") {
  TempRoot tmp("grid");
  auto c = small_config(tmp.path);
  c.seeds = {0, 1};

  const auto one = grid_search_alpha(c, {0.01}, {.write_files = false});
  CHECK(one.best_alpha == 0.01);
  REQUIRE(one.rows.size() == 1);

  // every alpha scores -cap in a single capped episode from the zero start
  auto tied = c;
  tied.episodes = 1;
  tied.step_cap = 10;
  const auto tie = grid_search_alpha(tied, {0.1, 0.01, 0.05}, {.write_files = false});
  CHECK(tie.rows.front().score == tie.rows.back().score);
  CHECK(tie.best_alpha == 0.01);

  // a large step size blows up; it must never win
  c.episodes = 20;
  c.step_cap = 1000;
  const auto g = grid_search_alpha(c, {0.01, 5.0});
  CHECK(g.best_alpha == 0.01);
  CHECK(g.rows.back().score < g.rows.front().score);
  CHECK(fs::exists(tmp.path / (c.label() + "-" + c.hash_hex() + "-grid.csv")));
}

TEST_CASE("value function grid") {
  const MountainCar env;
  BasisSet zero = build_fixed_coupled(2, 0, 2, 3);
  const auto g0 = value_function_grid(zero, 9);
  CHECK(g0.values.size() == 81);
  for (double v : g0.values) CHECK(v == 0.0);
  CHECK_THROWS(value_function_grid(zero, 1));

  BasisSet tiles = build_fixed_coupled(2, 0, 2, 3);
  Rng rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t a = 0; a < 3; ++a)
    for (auto& w : tiles.weights(a)) w = n(rng);
  const auto g = value_function_grid(tiles, 16);
  // corner is -max_a Q at the corner state
  const std::vector<double> corner{0.0, 0.0};
  double best = -1e300;
  for (std::size_t a = 0; a < 3; ++a) best = std::max(best, q_value(tiles, corner, a));
  CHECK(g.at(0, 0) == doctest::Approx(-best));
  // piecewise constant on each of the 4x4 tiles: interior lattice points share a value
  for (int iy = 0; iy < 16; ++iy)
    for (int ix = 0; ix < 16; ++ix) {
      const int tx = std::min(3, static_cast<int>(g.coords[static_cast<std::size_t>(ix)] * 4));
      const int ty = std::min(3, static_cast<int>(g.coords[static_cast<std::size_t>(iy)] * 4));
      const double ref = g.at(std::min(15, tx * 5), std::min(15, ty * 5));
      CHECK(g.at(ix, iy) == doctest::Approx(ref));
    }

  TempRoot tmp("vf");
  const auto path = tmp.path / "vf.csv";
  export_value_function(tiles, env, 5, path);  // normalized coordinates
  const auto rows = read_rows(path);
  CHECK(rows.size() == 25);
  CHECK(std::stod(rows[0][0]) == 0.0);
  CHECK(std::stod(rows.back()[0]) == 1.0);
}

TEST_CASE("frozen evaluation") {
  const MountainCar env;
  const BasisSet zero = build_fixed_coupled(2, 1, 1, 3);
  const std::vector<std::uint64_t> same{3, 3, 3};
  const auto r = evaluate_frozen(zero, env, 2, same, 150);
  CHECK(r.run_means.size() == 3);
  CHECK(r.stddev == 0.0);
  CHECK(r.mean == doctest::Approx(-150.0).epsilon(0.02));
}

TEST_CASE("config parsing") {
  ExperimentConfig c;
  std::istringstream good("# comment\nenv = acrobot\nscheme = mawb\nseeds = 0-3\nalpha = 0.002\ntau_split = inf\n");
  load_config(c, good);
  CHECK(c.env == "acrobot");
  CHECK(c.scheme == Scheme::mawb);
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2, 3});
  CHECK(c.agent.alpha == 0.002);
  CHECK(std::isinf(c.adaptive.tau_split));

  ExperimentConfig d;
  std::istringstream unknown("colour = blue\n");
  CHECK_THROWS(load_config(d, unknown));
  std::istringstream malformed("alpha\n");
  CHECK_THROWS(load_config(d, malformed));
  CHECK_THROWS(apply_setting(d, "alpha", "fast"));
  CHECK_THROWS(apply_setting(d, "scheme", "tiles"));
  CHECK_THROWS(parse_seed_list("5-2"));

  TempRoot tmp("invalid");
  auto bad = small_config(tmp.path);
  bad.agent.alpha = -1;
  CHECK_THROWS(run_experiment(bad));
  bad = small_config(tmp.path);
  bad.env = "nowhere";
  CHECK_THROWS(run_experiment(bad));
  CHECK(fs::is_empty(tmp.path));
}
