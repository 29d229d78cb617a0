#include "wavebasis/envs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace wavebasis {

namespace {

double unit(double x, double lo, double hi) { return std::clamp((x - lo) / (hi - lo), 0.0, 1.0); }

}  // namespace

double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double y = std::fmod(x + std::numbers::pi, two_pi);
  if (y < 0.0) y += two_pi;
  y -= std::numbers::pi;
  return y >= std::numbers::pi ? -std::numbers::pi : y;
}

EnvState MountainCar::reset(Rng& rng) const {
  std::uniform_real_distribution<double> position(-0.6, -0.4);
  return {{position(rng), 0.0}, false};
}

StepResult MountainCar::step(const EnvState& state, std::size_t action) const {
  if (state.terminal) throw terminal_step();
  if (action >= num_actions()) throw std::out_of_range("mountain car action must be 0, 1 or 2");
  const double p = state.raw.at(0);
  double v = state.raw.at(1) + kForce * (static_cast<double>(action) - 1.0) - kGravity * std::cos(3.0 * p);
  v = std::clamp(v, -kMaxSpeed, kMaxSpeed);
  double next_p = std::clamp(p + v, kMinPosition, kMaxPosition);
  if (next_p == kMinPosition && v < 0.0) v = 0.0;
  return {{{next_p, v}, next_p >= kGoalPosition}, -1.0};
}

std::vector<double> MountainCar::normalize(std::span<const double> raw) const {
  return {unit(raw[0], kMinPosition, kMaxPosition), unit(raw[1], -kMaxSpeed, kMaxSpeed)};
}

EnvState Acrobot::reset(Rng& rng) const {
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  EnvState s;
  s.raw.resize(4);
  for (auto& x : s.raw) x = u(rng);
  return s;
}

std::array<double, 4> Acrobot::derivatives(const std::array<double, 4>& s, double torque) {
  const double m1 = kLinkMass1, m2 = kLinkMass2, l1 = kLinkLength1;
  const double lc1 = kLinkCom1, lc2 = kLinkCom2, i1 = kLinkMoi, i2 = kLinkMoi, g = kGravity;
  const double theta1 = s[0], theta2 = s[1], dtheta1 = s[2], dtheta2 = s[3];
  const double half_pi = std::numbers::pi / 2.0;

  const double d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - half_pi);
  const double phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
                      2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - half_pi) + phi2;
  const double ddtheta2 = (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
                          (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2};
}

StepResult Acrobot::step(const EnvState& state, std::size_t action) const {
  if (state.terminal) throw terminal_step();
  if (action >= num_actions()) throw std::out_of_range("acrobot action must be 0, 1 or 2");
  const double torque = static_cast<double>(action) - 1.0;
  const std::array<double, 4> y0{state.raw.at(0), state.raw.at(1), state.raw.at(2), state.raw.at(3)};

  auto axpy = [](const std::array<double, 4>& y, const std::array<double, 4>& k, double h) {
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) out[i] = y[i] + h * k[i];
    return out;
  };
  const double h = dt_;
  const auto k1 = derivatives(y0, torque);
  const auto k2 = derivatives(axpy(y0, k1, h / 2.0), torque);
  const auto k3 = derivatives(axpy(y0, k2, h / 2.0), torque);
  const auto k4 = derivatives(axpy(y0, k3, h), torque);
  std::array<double, 4> y{};
  for (std::size_t i = 0; i < 4; ++i) y[i] = y0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  EnvState next;
  next.raw = {wrap_angle(y[0]), wrap_angle(y[1]), std::clamp(y[2], -kMaxVel1, kMaxVel1),
              std::clamp(y[3], -kMaxVel2, kMaxVel2)};
  next.terminal = -std::cos(next.raw[0]) - std::cos(next.raw[1] + next.raw[0]) > 1.0;
  return {std::move(next), -1.0};
}

std::vector<double> Acrobot::normalize(std::span<const double> raw) const {
  const double pi = std::numbers::pi;
  return {unit(wrap_angle(raw[0]), -pi, pi), unit(wrap_angle(raw[1]), -pi, pi), unit(raw[2], -kMaxVel1, kMaxVel1),
          unit(raw[3], -kMaxVel2, kMaxVel2)};
}

std::unique_ptr<Environment> make_environment(std::string_view name) {
  if (name == "mountain-car") return std::make_unique<MountainCar>();
  if (name == "acrobot") return std::make_unique<Acrobot>();
  throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

}  // namespace wavebasis
