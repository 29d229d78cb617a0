#include "wavebasis/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <stdexcept>

namespace wavebasis {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw std::invalid_argument("invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  if (v == "inf" || v == "infinity" || v == "+inf") return kNever;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v);
}

nlohmann::json threshold_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"name", [](auto& c, auto, auto v) { c.name = std::string(v); }},
      {"env", [](auto& c, auto, auto v) { c.env = std::string(v); }},
      {"scheme", [](auto& c, auto, auto v) { c.scheme = parse_scheme(v); }},
      {"order", [](auto& c, auto k, auto v) { c.order = to_int<int>(k, v); }},
      {"scale", [](auto& c, auto k, auto v) { c.scale = to_int<int>(k, v); }},
      {"fourier_order", [](auto& c, auto k, auto v) { c.fourier_order = to_int<int>(k, v); }},
      {"alpha", [](auto& c, auto k, auto v) { c.agent.alpha = to_double(k, v); }},
      {"gamma", [](auto& c, auto k, auto v) { c.agent.gamma = to_double(k, v); }},
      {"lambda", [](auto& c, auto k, auto v) { c.agent.lambda = to_double(k, v); }},
      {"epsilon_greedy", [](auto& c, auto k, auto v) { c.agent.epsilon_greedy = to_double(k, v); }},
      {"replacing_traces", [](auto& c, auto k, auto v) { c.agent.replacing_traces = to_bool(k, v); }},
      {"fourier_alpha_scaling", [](auto& c, auto k, auto v) { c.agent.fourier_alpha_scaling = to_bool(k, v); }},
      {"tau_split", [](auto& c, auto k, auto v) { c.adaptive.tau_split = to_double(k, v); }},
      {"tau_combine", [](auto& c, auto k, auto v) { c.adaptive.tau_combine = to_double(k, v); }},
      {"relevance_eps", [](auto& c, auto k, auto v) { c.adaptive.eps = to_double(k, v); }},
      {"check_interval", [](auto& c, auto k, auto v) { c.adaptive.check_interval = to_int<std::uint64_t>(k, v); }},
      {"max_scale", [](auto& c, auto k, auto v) { c.adaptive.max_scale = to_int<int>(k, v); }},
      {"max_features", [](auto& c, auto k, auto v) { c.adaptive.max_features = to_int<std::size_t>(k, v); }},
      {"episodes", [](auto& c, auto k, auto v) { c.episodes = to_int<int>(k, v); }},
      {"step_cap", [](auto& c, auto k, auto v) { c.step_cap = to_int<std::uint64_t>(k, v); }},
      {"seeds", [](auto& c, auto, auto v) { c.seeds = parse_seed_list(v); }},
      {"output_dir", [](auto& c, auto, auto v) { c.output_dir = std::string(v); }},
      {"curve_window", [](auto& c, auto k, auto v) { c.curve_window = to_int<int>(k, v); }},
      {"selection_window", [](auto& c, auto k, auto v) { c.selection_window = to_int<int>(k, v); }},
      {"size_cap", [](auto& c, auto k, auto v) { c.size_cap = to_int<std::size_t>(k, v); }},
  };
  return table;
}

}  // namespace

Scheme parse_scheme(std::string_view name) {
  static const std::map<std::string_view, Scheme> names = {
      {"bspline-coupled", Scheme::bspline_coupled}, {"bspline-decoupled", Scheme::bspline_decoupled},
      {"fourier", Scheme::fourier},                 {"awr", Scheme::awr},
      {"ibfdd", Scheme::ibfdd},                     {"mawb", Scheme::mawb}};
  const auto it = names.find(name);
  if (it == names.end()) throw std::invalid_argument("unknown basis scheme '" + std::string(name) + "'");
  return it->second;
}

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::bspline_coupled: return "bspline-coupled";
    case Scheme::bspline_decoupled: return "bspline-decoupled";
    case Scheme::fourier: return "fourier";
    case Scheme::awr: return "awr";
    case Scheme::ibfdd: return "ibfdd";
    case Scheme::mawb: return "mawb";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (env != "mountain-car" && env != "acrobot") fail("unknown env '" + env + "'");
  if (scheme == Scheme::fourier) {
    if (fourier_order < 0) fail("fourier_order must be >= 0");
  } else {
    if (order < 0 || order > kMaxOrder) fail("order must be in 0.." + std::to_string(kMaxOrder));
    if (scale < 0 || scale > 20) fail("scale must be in 0..20");
  }
  try {
    agent.validate();
    adaptive.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (scheme == Scheme::awr || scheme == Scheme::mawb) {
    if (adaptive.max_scale < scale) fail("max_scale must be >= scale");
  }
  if (episodes < 1) fail("episodes must be >= 1");
  if (step_cap < 1) fail("step_cap must be >= 1");
  if (seeds.empty()) fail("seeds must be non-empty");
  if (curve_window < 1 || selection_window < 1) fail("smoothing windows must be >= 1");
}

std::string ExperimentConfig::label() const {
  return name.empty() ? env + "-" + to_string(scheme) : name;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["name"] = label();
  j["env"] = env;
  j["scheme"] = to_string(scheme);
  j["order"] = order;
  j["scale"] = scale;
  j["fourier_order"] = fourier_order;
  j["alpha"] = agent.alpha;
  j["gamma"] = agent.gamma;
  j["lambda"] = agent.lambda;
  j["epsilon_greedy"] = agent.epsilon_greedy;
  j["replacing_traces"] = agent.replacing_traces;
  j["fourier_alpha_scaling"] = agent.fourier_alpha_scaling;
  j["tau_split"] = threshold_json(adaptive.tau_split);
  j["tau_combine"] = threshold_json(adaptive.tau_combine);
  j["relevance_eps"] = adaptive.eps;
  j["check_interval"] = adaptive.check_interval;
  j["max_scale"] = adaptive.max_scale;
  j["max_features"] = adaptive.max_features;
  j["episodes"] = episodes;
  j["step_cap"] = step_cap;
  j["seeds"] = seeds;
  j["output_dir"] = output_dir;
  j["curve_window"] = curve_window;
  j["selection_window"] = selection_window;
  j["size_cap"] = size_cap;
  return j;
}

std::uint64_t ExperimentConfig::hash() const {
  nlohmann::json j = to_json();
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  for (const auto& [name, setter] : setters()) {
    if (name == key) {
      setter(config, key, value);
      return;
    }
  }
  throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& entry : setters()) out.push_back(entry.first);
    return out;
  }();
  return keys;
}

void load_config(ExperimentConfig& config, std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      apply_setting(config, view.substr(0, eq), view.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  ExperimentConfig config;
  load_config(config, in);
  return config;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string_view item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    if (item.empty()) bad_value("seeds", text);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      out.push_back(to_int<std::uint64_t>("seeds", item));
    } else {
      const auto lo = to_int<std::uint64_t>("seeds", trim(item.substr(0, dash)));
      const auto hi = to_int<std::uint64_t>("seeds", trim(item.substr(dash + 1)));
      if (hi < lo) bad_value("seeds", text);
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::filesystem::path output_root(const ExperimentConfig& config) {
  if (const char* env = std::getenv("WAVEBASIS_OUTPUT_ROOT"); env != nullptr && *env != '\0') return env;
  return config.output_dir;
}

std::filesystem::path run_directory(const ExperimentConfig& config) {
  return output_root(config) / (config.label() + "-" + config.hash_hex());
}

}  // namespace wavebasis
