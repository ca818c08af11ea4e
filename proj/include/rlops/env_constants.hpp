#pragma once

// All physical constants, thresholds and episode caps of the three
// classic-control tasks, pinned in one place. The dynamics follow the
// de-facto standard formulations (Moore's mountain car, the
// Barto-Sutton-Anderson cart-pole, Sutton's acrobot) so results are
// reproducible without any external toolkit.

namespace rlops::consts {

namespace mountain_car {
inline constexpr double min_position = -1.2;
inline constexpr double max_position = 0.6;
inline constexpr double max_speed = 0.07;
inline constexpr double goal_position = 0.5;
inline constexpr double goal_velocity = 0.0;
inline constexpr double force = 0.001;
inline constexpr double gravity = 0.0025;
inline constexpr double reset_low = -0.6;
inline constexpr double reset_high = -0.4;
inline constexpr int n_actions = 3; // push left / no push / push right
inline constexpr int step_cap = 200;
} // namespace mountain_car

namespace cart_pole {
inline constexpr double gravity = 9.8;
inline constexpr double cart_mass = 1.0;
inline constexpr double pole_mass = 0.1;
inline constexpr double total_mass = cart_mass + pole_mass;
inline constexpr double pole_half_length = 0.5;
inline constexpr double pole_mass_length = pole_mass * pole_half_length;
inline constexpr double force_mag = 10.0;
inline constexpr double tau = 0.02; // seconds per Euler step
inline constexpr double x_threshold = 2.4;
inline constexpr double theta_threshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
inline constexpr double reset_span = 0.05; // all components uniform in +-span
// Velocity components are unbounded in the dynamics; this clamp range is
// only used for discretization.
inline constexpr double velocity_clamp = 3.0;
inline constexpr int n_actions = 2; // push left / push right
inline constexpr int step_cap = 500;
} // namespace cart_pole

namespace acrobot {
inline constexpr double link_length_1 = 1.0;
inline constexpr double link_mass_1 = 1.0;
inline constexpr double link_mass_2 = 1.0;
inline constexpr double link_com_1 = 0.5;
inline constexpr double link_com_2 = 0.5;
inline constexpr double link_moi = 1.0; // moment of inertia, both links
inline constexpr double gravity = 9.8;
inline constexpr double dt = 0.2; // seconds per RK4 step
inline constexpr double max_vel_1 = 4.0 * 3.14159265358979323846;
inline constexpr double max_vel_2 = 9.0 * 3.14159265358979323846;
inline constexpr double reset_span = 0.1;
inline constexpr int n_actions = 3; // torque -1 / 0 / +1 on the second joint
inline constexpr int step_cap = 500;
} // namespace acrobot

} // namespace rlops::consts
