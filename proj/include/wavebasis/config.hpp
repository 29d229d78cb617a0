#ifndef WAVEBASIS_CONFIG_HPP
#define WAVEBASIS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include "wavebasis/adaptive.hpp"
#include "wavebasis/agent.hpp"

namespace wavebasis {

enum class Scheme { bspline_coupled, bspline_decoupled, fourier, awr, ibfdd, mawb };

Scheme parse_scheme(std::string_view name);
const char* to_string(Scheme scheme);

struct ExperimentConfig {
  std::string name;  ///< label used in output paths; defaults to "<env>-<scheme>"
  std::string env = "mountain-car";
  Scheme scheme = Scheme::bspline_coupled;
  int order = 2;
  int scale = 2;
  int fourier_order = 5;
  AgentConfig agent;
  AdaptiveConfig adaptive;
  int episodes = 500;
  std::uint64_t step_cap = 2000;
  std::vector<std::uint64_t> seeds = {0};
  std::string output_dir = "results";
  int curve_window = 20;
  int selection_window = 100;
  std::size_t size_cap = kDefaultSizeCap;

  /// Throws std::invalid_argument with a descriptive message.
  void validate() const;

  std::string label() const;
  nlohmann::json to_json() const;
  /// FNV-1a over the canonical JSON of every field except output_dir.
  std::uint64_t hash() const;
  std::string hash_hex() const;
};

/// Sets one field from its textual form. Keys match the config-file keys.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Every recognised key, in documentation order.
const std::vector<std::string>& config_keys();

/// "key = value" lines; '#' starts a comment; blank lines are ignored.
void load_config(ExperimentConfig& config, std::istream& in);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// "0,1,2" or ranges such as "0-9".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

/// Absolute-or-relative root for all outputs: $WAVEBASIS_OUTPUT_ROOT when
/// set, otherwise config.output_dir.
std::filesystem::path output_root(const ExperimentConfig& config);

/// Distinct per config: <root>/<label>-<hash>.
std::filesystem::path run_directory(const ExperimentConfig& config);

}  // namespace wavebasis

#endif
