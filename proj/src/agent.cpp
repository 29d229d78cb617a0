#include "wavebasis/agent.hpp"

#include <stdexcept>

namespace wavebasis {

void AgentConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  if (!(epsilon_greedy >= 0.0 && epsilon_greedy <= 1.0)) throw std::invalid_argument("epsilon_greedy must lie in [0, 1]");
}

double q_value(const BasisSet& basis, std::span<const ActiveFeature> active, std::size_t action) {
  const auto& w = basis.weights(action);
  double q = 0.0;
  for (const auto& f : active) q += w[f.index] * f.value;
  return q;
}

double q_value(const BasisSet& basis, std::span<const double> state, std::size_t action) {
  return q_value(basis, basis.active_features(state), action);
}

std::size_t select_action(const BasisSet& basis, std::span<const ActiveFeature> active, double epsilon_greedy,
                          Rng& rng) {
  const std::size_t n = basis.num_actions();
  if (epsilon_greedy > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon_greedy) return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }
  double best = 0.0;
  std::size_t ties = 0;
  std::size_t choice = 0;
  // reservoir sampling over the argmax set
  for (std::size_t a = 0; a < n; ++a) {
    const double q = q_value(basis, active, a);
    if (ties == 0 || q > best) {
      best = q;
      choice = a;
      ties = 1;
    } else if (q == best) {
      ++ties;
      if (std::uniform_int_distribution<std::size_t>(0, ties - 1)(rng) == 0) choice = a;
    }
  }
  return choice;
}

double td_error(const BasisSet& basis, const TDSample& sample, double gamma) {
  const double q = q_value(basis, std::span<const double>(sample.state), sample.action);
  const double next = sample.terminal ? 0.0 : q_value(basis, std::span<const double>(sample.next_state), sample.next_action);
  return sample.reward + gamma * next - q;
}

void apply_sarsa_update(BasisSet& basis, std::span<const ActiveFeature> active, std::size_t action, double delta,
                        const AgentConfig& config) {
  auto& trace = basis.traces(action);
  for (const auto& f : active) {
    if (config.replacing_traces) {
      trace[f.index] = f.value;
    } else {
      trace[f.index] += f.value;
    }
  }

  const std::size_t n = basis.size();
  const double decay = config.gamma * config.lambda;
  const double step = config.alpha * delta;
  const auto& functions = basis.functions();
  for (std::size_t b = 0; b < basis.num_actions(); ++b) {
    auto& w = basis.weights(b);
    auto& e = basis.traces(b);
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = config.fourier_alpha_scaling ? functions[i].learning_rate_scale() : 1.0;
      w[i] += step * scale * e[i];
      e[i] *= decay;
    }
  }
}

double sarsa_step(BasisSet& basis, TDSample& sample, const AgentConfig& config) {
  sample.delta = td_error(basis, sample, config.gamma);
  const auto active = basis.active_features(sample.state);
  apply_sarsa_update(basis, active, sample.action, sample.delta, config);
  return sample.delta;
}

EpisodeRecord run_episode(const Environment& env, BasisSet& basis, AdaptiveController* controller,
                          const AgentConfig& config, Rng& rng, std::uint64_t& global_step,
                          const EpisodeOptions& options) {
  EpisodeRecord rec;
  rec.episode = options.episode;
  basis.clear_traces();

  EnvState state = env.reset(rng);
  std::vector<double> x = env.normalize(state.raw);
  std::vector<ActiveFeature> active, next_active;
  basis.active_features(x, active);
  std::size_t action = select_action(basis, active, config.epsilon_greedy, rng);

  while (!state.terminal && rec.steps < options.step_cap) {
    if (options.on_state) options.on_state(x);
    StepResult out = env.step(state, action);
    rec.total_return += out.reward;
    ++rec.steps;

    std::vector<double> next_x = env.normalize(out.state.raw);
    std::size_t next_action = 0;
    double delta = out.reward - q_value(basis, active, action);
    if (!out.state.terminal) {
      basis.active_features(next_x, next_active);
      next_action = select_action(basis, next_active, config.epsilon_greedy, rng);
      delta += config.gamma * q_value(basis, next_active, next_action);
    }

    if (options.learn) {
      apply_sarsa_update(basis, active, action, delta, config);
      if (options.on_delta) options.on_delta(delta, active);
      if (controller) {
        controller->observe(basis, active, delta);
        ++global_step;
        if (auto edit = controller->on_step(basis, global_step)) {
          edit->episode = options.episode;
          ++rec.edits;
          if (options.on_edit) options.on_edit(*edit);
          // ids and indices moved; the represented Q is unchanged
          if (!out.state.terminal) basis.active_features(next_x, next_active);
        }
      } else {
        ++global_step;
      }
    }

    state = std::move(out.state);
    x = std::move(next_x);
    std::swap(active, next_active);
    action = next_action;
  }
  if (options.on_state && !state.terminal) options.on_state(x);
  rec.basis_size = basis.size();
  return rec;
}

}  // namespace wavebasis
