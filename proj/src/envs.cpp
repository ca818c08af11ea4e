#include "rlops/envs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rlops/env_constants.hpp"

namespace rlops {

namespace {
double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

double wrap_pi(double angle) {
    const double two_pi = 2.0 * std::numbers::pi;
    angle = std::fmod(angle + std::numbers::pi, two_pi);
    if (angle < 0.0) angle += two_pi;
    return angle - std::numbers::pi;
}
} // namespace

EnvName env_from_name(const std::string& name) {
    if (name == "mountain-car") return EnvName::MountainCar;
    if (name == "cart-pole") return EnvName::CartPole;
    if (name == "acrobot") return EnvName::Acrobot;
    throw std::invalid_argument("unknown environment: " + name);
}

std::string env_to_name(EnvName env) {
    switch (env) {
    case EnvName::MountainCar: return "mountain-car";
    case EnvName::CartPole: return "cart-pole";
    case EnvName::Acrobot: return "acrobot";
    }
    return "unknown";
}

int env_n_actions(EnvName env) {
    switch (env) {
    case EnvName::MountainCar: return consts::mountain_car::n_actions;
    case EnvName::CartPole: return consts::cart_pole::n_actions;
    case EnvName::Acrobot: return consts::acrobot::n_actions;
    }
    return 0;
}

int env_obs_dim(EnvName env) {
    switch (env) {
    case EnvName::MountainCar: return 2;
    case EnvName::CartPole: return 4;
    case EnvName::Acrobot: return 6;
    }
    return 0;
}

int env_step_cap(EnvName env) {
    switch (env) {
    case EnvName::MountainCar: return consts::mountain_car::step_cap;
    case EnvName::CartPole: return consts::cart_pole::step_cap;
    case EnvName::Acrobot: return consts::acrobot::step_cap;
    }
    return 0;
}

ContinuousObservation env_reset(EnvName env, std::uint64_t seed) {
    SplitMix64 rng(seed);
    switch (env) {
    case EnvName::MountainCar: {
        using namespace consts::mountain_car;
        return {rng.uniform(reset_low, reset_high), 0.0};
    }
    case EnvName::CartPole: {
        using namespace consts::cart_pole;
        ContinuousObservation obs(4);
        for (double& x : obs) x = rng.uniform(-reset_span, reset_span);
        return obs;
    }
    case EnvName::Acrobot: {
        using namespace consts::acrobot;
        const double th1 = rng.uniform(-reset_span, reset_span);
        const double th2 = rng.uniform(-reset_span, reset_span);
        const double dth1 = rng.uniform(-reset_span, reset_span);
        const double dth2 = rng.uniform(-reset_span, reset_span);
        return {std::cos(th1), std::sin(th1), std::cos(th2), std::sin(th2), dth1, dth2};
    }
    }
    throw std::invalid_argument("env_reset: unknown environment");
}

namespace {

EnvOutcome step_mountain_car(const ContinuousObservation& obs, int action) {
    using namespace consts::mountain_car;
    double position = obs[0];
    double velocity = obs[1];
    velocity += (action - 1) * force - std::cos(3.0 * position) * gravity;
    velocity = clamp(velocity, -max_speed, max_speed);
    position += velocity;
    position = clamp(position, min_position, max_position);
    if (position <= min_position && velocity < 0.0) velocity = 0.0; // inelastic left wall
    EnvOutcome out;
    out.next_observation = {position, velocity};
    out.terminal = position >= goal_position && velocity >= goal_velocity;
    out.reward = out.terminal ? 0.0 : -1.0;
    return out;
}

EnvOutcome step_cart_pole(const ContinuousObservation& obs, int action) {
    using namespace consts::cart_pole;
    double x = obs[0], x_dot = obs[1], theta = obs[2], theta_dot = obs[3];
    const double applied = action == 1 ? force_mag : -force_mag;
    const double cos_th = std::cos(theta);
    const double sin_th = std::sin(theta);
    const double temp = (applied + pole_mass_length * theta_dot * theta_dot * sin_th) / total_mass;
    const double theta_acc = (gravity * sin_th - cos_th * temp) /
                             (pole_half_length * (4.0 / 3.0 - pole_mass * cos_th * cos_th / total_mass));
    const double x_acc = temp - pole_mass_length * theta_acc * cos_th / total_mass;
    x += tau * x_dot;
    x_dot += tau * x_acc;
    theta += tau * theta_dot;
    theta_dot += tau * theta_acc;
    EnvOutcome out;
    out.next_observation = {x, x_dot, theta, theta_dot};
    out.terminal = std::abs(x) > x_threshold || std::abs(theta) > theta_threshold;
    out.reward = 1.0; // +1 every step, including the failure step
    return out;
}

using AcrobotState = std::array<double, 4>; // theta1, theta2, dtheta1, dtheta2

AcrobotState acrobot_derivatives(const AcrobotState& s, double torque) {
    using namespace consts::acrobot;
    const double th1 = s[0], th2 = s[1], dth1 = s[2], dth2 = s[3];
    const double m1 = link_mass_1, m2 = link_mass_2;
    const double l1 = link_length_1;
    const double lc1 = link_com_1, lc2 = link_com_2;
    const double i1 = link_moi, i2 = link_moi;
    const double g = gravity;
    const double d1 =
        m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(th2)) + i1 + i2;
    const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(th2)) + i2;
    const double phi2 = m2 * lc2 * g * std::cos(th1 + th2 - std::numbers::pi / 2.0);
    const double phi1 = -m2 * l1 * lc2 * dth2 * dth2 * std::sin(th2) -
                        2.0 * m2 * l1 * lc2 * dth2 * dth1 * std::sin(th2) +
                        (m1 * lc1 + m2 * l1) * g * std::cos(th1 - std::numbers::pi / 2.0) + phi2;
    const double ddth2 =
        (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dth1 * dth1 * std::sin(th2) - phi2) /
        (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
    const double ddth1 = -(d2 * ddth2 + phi1) / d1;
    return {dth1, dth2, ddth1, ddth2};
}

AcrobotState rk4_step(const AcrobotState& s, double torque, double h) {
    auto add = [](const AcrobotState& a, const AcrobotState& b, double w) {
        AcrobotState out;
        for (int i = 0; i < 4; ++i) out[i] = a[i] + w * b[i];
        return out;
    };
    const AcrobotState k1 = acrobot_derivatives(s, torque);
    const AcrobotState k2 = acrobot_derivatives(add(s, k1, h / 2.0), torque);
    const AcrobotState k3 = acrobot_derivatives(add(s, k2, h / 2.0), torque);
    const AcrobotState k4 = acrobot_derivatives(add(s, k3, h), torque);
    AcrobotState out;
    for (int i = 0; i < 4; ++i)
        out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

EnvOutcome step_acrobot(const ContinuousObservation& obs, int action) {
    using namespace consts::acrobot;
    AcrobotState s = {std::atan2(obs[1], obs[0]), std::atan2(obs[3], obs[2]), obs[4], obs[5]};
    s = rk4_step(s, static_cast<double>(action - 1), dt);
    s[0] = wrap_pi(s[0]);
    s[1] = wrap_pi(s[1]);
    s[2] = clamp(s[2], -max_vel_1, max_vel_1);
    s[3] = clamp(s[3], -max_vel_2, max_vel_2);
    EnvOutcome out;
    out.next_observation = {std::cos(s[0]), std::sin(s[0]), std::cos(s[1]),
                            std::sin(s[1]), s[2],           s[3]};
    out.terminal = -std::cos(s[0]) - std::cos(s[1] + s[0]) > 1.0;
    out.reward = out.terminal ? 0.0 : -1.0;
    return out;
}

} // namespace

EnvOutcome env_step(EnvName env, const ContinuousObservation& obs, int action) {
    if (static_cast<int>(obs.size()) != env_obs_dim(env))
        throw std::invalid_argument("env_step: observation dimension mismatch");
    if (action < 0 || action >= env_n_actions(env))
        throw std::invalid_argument("env_step: invalid action index");
    switch (env) {
    case EnvName::MountainCar: return step_mountain_car(obs, action);
    case EnvName::CartPole: return step_cart_pole(obs, action);
    case EnvName::Acrobot: return step_acrobot(obs, action);
    }
    throw std::invalid_argument("env_step: unknown environment");
}

std::int64_t GridSpec::total_cells() const {
    std::int64_t total = 1;
    for (int b : bins) total *= b;
    return total;
}

std::vector<std::pair<double, double>> default_clamp_ranges(EnvName env) {
    switch (env) {
    case EnvName::MountainCar: {
        using namespace consts::mountain_car;
        return {{min_position, max_position}, {-max_speed, max_speed}};
    }
    case EnvName::CartPole: {
        using namespace consts::cart_pole;
        return {{-x_threshold, x_threshold},
                {-velocity_clamp, velocity_clamp},
                {-theta_threshold, theta_threshold},
                {-velocity_clamp, velocity_clamp}};
    }
    case EnvName::Acrobot: {
        using namespace consts::acrobot;
        return {{-1.0, 1.0}, {-1.0, 1.0},         {-1.0, 1.0},
                {-1.0, 1.0}, {-max_vel_1, max_vel_1}, {-max_vel_2, max_vel_2}};
    }
    }
    throw std::invalid_argument("default_clamp_ranges: unknown environment");
}

GridSpec make_grid(EnvName env, const std::vector<int>& bins) {
    GridSpec spec;
    spec.ranges = default_clamp_ranges(env);
    if (bins.size() != spec.ranges.size())
        throw std::invalid_argument("make_grid: bin count does not match observation dimension");
    spec.bins = bins;
    for (int b : spec.bins)
        if (b < 1) throw std::invalid_argument("make_grid: bin counts must be >= 1");
    return spec;
}

std::vector<int> parse_grid_shape(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("grid syntax: empty specification");
    std::vector<int> bins;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = text.find('x', pos);
        if (next == std::string::npos) next = text.size();
        const std::string part = text.substr(pos, next - pos);
        if (part.empty()) throw std::invalid_argument("grid syntax: empty dimension in '" + text + "'");
        bins.push_back(std::stoi(part));
        if (next == text.size()) break;
        pos = next + 1;
    }
    return bins;
}

std::int64_t discretize(const ContinuousObservation& obs, const GridSpec& spec) {
    if (obs.size() != spec.bins.size() || spec.bins.size() != spec.ranges.size())
        throw std::invalid_argument("discretize: dimension mismatch");
    std::int64_t index = 0;
    for (std::size_t d = 0; d < obs.size(); ++d) {
        const auto [lo, hi] = spec.ranges[d];
        const int bins = spec.bins[d];
        const double x = clamp(obs[d], lo, hi);
        int b = static_cast<int>((x - lo) / (hi - lo) * bins);
        b = std::min(b, bins - 1); // the exact upper edge maps to the top bin
        index = index * bins + b;
    }
    return index;
}

ClassicControlEnv::ClassicControlEnv(EnvName env, GridSpec grid)
    : env_(env), grid_(std::move(grid)) {
    if (static_cast<int>(grid_.bins.size()) != env_obs_dim(env_))
        throw std::invalid_argument("ClassicControlEnv: grid dimension mismatch");
}

std::int64_t ClassicControlEnv::reset(SplitMix64& rng) {
    obs_ = env_reset(env_, rng.next_u64());
    steps_ = 0;
    done_ = false;
    return discretize(obs_, grid_);
}

TabularStep ClassicControlEnv::step(int action, SplitMix64& /*rng*/) {
    if (done_) throw std::logic_error("ClassicControlEnv: step after episode end without reset");
    EnvOutcome outcome = env_step(env_, obs_, action);
    obs_ = std::move(outcome.next_observation);
    ++steps_;
    TabularStep out;
    out.next_state = discretize(obs_, grid_);
    out.reward = outcome.reward;
    out.terminal = outcome.terminal;
    out.truncated = !outcome.terminal && steps_ >= env_step_cap(env_);
    done_ = out.terminal || out.truncated;
    return out;
}

} // namespace rlops
