#ifndef WAVEBASIS_AGENT_HPP
#define WAVEBASIS_AGENT_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wavebasis/adaptive.hpp"
#include "wavebasis/basis.hpp"
#include "wavebasis/envs.hpp"

namespace wavebasis {

struct AgentConfig {
  double alpha = 0.01;
  double gamma = 1.0;
  double lambda = 0.9;
  double epsilon_greedy = 0.0;
  std::uint64_t seed = 0;
  bool replacing_traces = false;
  /// Divide the step size of each Fourier term by ||c||_2.
  bool fourier_alpha_scaling = true;

  void validate() const;
};

/// One on-policy transition. `delta` is filled by td_error().
struct TDSample {
  std::vector<double> state;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  std::size_t next_action = 0;
  bool terminal = false;
  double delta = 0.0;
};

double q_value(const BasisSet& basis, std::span<const ActiveFeature> active, std::size_t action);
double q_value(const BasisSet& basis, std::span<const double> state, std::size_t action);

/// Epsilon-greedy; greedy ties are broken uniformly at random.
std::size_t select_action(const BasisSet& basis, std::span<const ActiveFeature> active, double epsilon_greedy,
                          Rng& rng);

/// r + gamma Q(s', a') - Q(s, a), with the bootstrap dropped at terminal s'.
double td_error(const BasisSet& basis, const TDSample& sample, double gamma);

/// Trace bump for the active features of (s, a), weight update along every
/// action's trace, then decay of all traces by gamma * lambda.
void apply_sarsa_update(BasisSet& basis, std::span<const ActiveFeature> active, std::size_t action, double delta,
                        const AgentConfig& config);

/// Computes delta for `sample`, stores it there, applies the update.
double sarsa_step(BasisSet& basis, TDSample& sample, const AgentConfig& config);

struct EpisodeRecord {
  int episode = 0;
  double total_return = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t edits = 0;  ///< structural edits during this episode
  std::size_t basis_size = 0;
};

struct EpisodeOptions {
  std::uint64_t step_cap = 2000;
  int episode = 0;
  bool learn = true;
  /// Per-step hook receiving the TD error and the features active at s_t.
  std::function<void(double, std::span<const ActiveFeature>)> on_delta;
  std::function<void(const EditRecord&)> on_edit;
  std::function<void(std::span<const double>)> on_state;  ///< every normalized state visited
};

/// Runs one episode of Sarsa(lambda). `controller` may be null for a fixed
/// basis. `global_step` counts steps across episodes and drives the
/// adaptive check schedule.
EpisodeRecord run_episode(const Environment& env, BasisSet& basis, AdaptiveController* controller,
                          const AgentConfig& config, Rng& rng, std::uint64_t& global_step,
                          const EpisodeOptions& options);

}  // namespace wavebasis

#endif
