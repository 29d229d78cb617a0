#ifndef WAVEBASIS_ENVS_HPP
#define WAVEBASIS_ENVS_HPP

#include <array>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wavebasis {

/// Every stochastic choice in a run (resets, exploration, tie-breaking)
/// draws from one engine seeded per run.
using Rng = std::mt19937_64;

struct EnvState {
  std::vector<double> raw;
  bool terminal = false;
};

struct StepResult {
  EnvState state;
  double reward = 0.0;
};

class terminal_step : public std::logic_error {
 public:
  terminal_step() : std::logic_error("cannot step from a terminal state") {}
};

/// Episodic control task with a fixed action set. Implementations are
/// stateless; the caller owns the EnvState.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int dims() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual EnvState reset(Rng& rng) const = 0;
  /// Throws terminal_step when `state` is terminal.
  virtual StepResult step(const EnvState& state, std::size_t action) const = 0;
  /// Affine image of a raw state in [0,1]^d.
  virtual std::vector<double> normalize(std::span<const double> raw) const = 0;
};

/// Classic mountain car: position in [-1.2, 0.6], velocity in [-0.07, 0.07],
/// actions {reverse, coast, forward}, goal at position >= 0.5.
class MountainCar final : public Environment {
 public:
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.5;
  static constexpr double kForce = 0.001;
  static constexpr double kGravity = 0.0025;

  std::string name() const override { return "mountain-car"; }
  int dims() const override { return 2; }
  std::size_t num_actions() const override { return 3; }
  EnvState reset(Rng& rng) const override;
  StepResult step(const EnvState& state, std::size_t action) const override;
  std::vector<double> normalize(std::span<const double> raw) const override;
};

/// Two-link underactuated pendulum (state theta1, theta2, dtheta1, dtheta2)
/// with torque in {-1, 0, +1} on the second joint, integrated by RK4.
class Acrobot final : public Environment {
 public:
  static constexpr double kLinkLength1 = 1.0;
  static constexpr double kLinkMass1 = 1.0;
  static constexpr double kLinkMass2 = 1.0;
  static constexpr double kLinkCom1 = 0.5;
  static constexpr double kLinkCom2 = 0.5;
  static constexpr double kLinkMoi = 1.0;
  static constexpr double kGravity = 9.8;
  static constexpr double kMaxVel1 = 4.0 * std::numbers::pi;
  static constexpr double kMaxVel2 = 9.0 * std::numbers::pi;

  explicit Acrobot(double dt = 0.2) : dt_(dt) {}

  std::string name() const override { return "acrobot"; }
  int dims() const override { return 4; }
  std::size_t num_actions() const override { return 3; }
  EnvState reset(Rng& rng) const override;
  StepResult step(const EnvState& state, std::size_t action) const override;
  std::vector<double> normalize(std::span<const double> raw) const override;

  double dt() const { return dt_; }

  /// Time derivative of (theta1, theta2, dtheta1, dtheta2) under `torque`.
  static std::array<double, 4> derivatives(const std::array<double, 4>& s, double torque);

 private:
  double dt_;
};

/// Wraps an angle into [-pi, pi).
double wrap_angle(double x);

/// "mountain-car" or "acrobot"; throws std::invalid_argument otherwise.
std::unique_ptr<Environment> make_environment(std::string_view name);

}  // namespace wavebasis

#endif
