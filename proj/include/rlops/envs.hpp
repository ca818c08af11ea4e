#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlops/tabular_env.hpp"

namespace rlops {

enum class EnvName { MountainCar, CartPole, Acrobot };

EnvName env_from_name(const std::string& name); // mountain-car / cart-pole / acrobot
std::string env_to_name(EnvName env);
int env_n_actions(EnvName env);
int env_obs_dim(EnvName env); // 2 / 4 / 6
int env_step_cap(EnvName env);

using ContinuousObservation = std::vector<double>;

struct EnvOutcome {
    ContinuousObservation next_observation;
    double reward = 0.0;
    bool terminal = false;
    bool truncated = false;
};

/// Seeded draw from the task's standard initial distribution.
ContinuousObservation env_reset(EnvName env, std::uint64_t seed);

/// One physics step. The observation is the full dynamic state, so this is
/// a pure function; step-cap truncation is handled by the stateful wrapper.
EnvOutcome env_step(EnvName env, const ContinuousObservation& obs, int action);

/// Uniform binning grid: per-dimension bin counts and clamp ranges.
struct GridSpec {
    std::vector<int> bins;
    std::vector<std::pair<double, double>> ranges;

    std::int64_t total_cells() const;
};

/// Clamp ranges covering each environment's reachable box (CartPole's
/// unbounded velocity dimensions clamp to +-3).
std::vector<std::pair<double, double>> default_clamp_ranges(EnvName env);

/// GridSpec with the given per-dimension bin counts and the default ranges.
GridSpec make_grid(EnvName env, const std::vector<int>& bins);

/// Parses "40x40"-style grid syntax.
std::vector<int> parse_grid_shape(const std::string& text);

/// Clamp, bin and flatten row-major (dimension 0 slowest).
std::int64_t discretize(const ContinuousObservation& obs, const GridSpec& spec);

/// Classic-control task as a tabular environment via grid discretization.
class ClassicControlEnv final : public TabularEnv {
public:
    ClassicControlEnv(EnvName env, GridSpec grid);

    std::int64_t n_states() const override { return grid_.total_cells(); }
    int n_actions() const override { return env_n_actions(env_); }
    std::int64_t reset(SplitMix64& rng) override;
    TabularStep step(int action, SplitMix64& rng) override;

    const ContinuousObservation& observation() const { return obs_; }

private:
    EnvName env_;
    GridSpec grid_;
    ContinuousObservation obs_;
    int steps_ = 0;
    bool done_ = true;
};

} // namespace rlops
