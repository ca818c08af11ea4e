#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "rlops/mdp.hpp"
#include "rlops/operators.hpp"
#include "rlops/rng.hpp"
#include "rlops/tabular_env.hpp"

namespace rlops {

enum class BackupKind { Classical, Consistent, Advantage };

BackupKind backup_from_name(const std::string& name); // bellman / consistent / advantage
std::string backup_to_name(BackupKind kind);

/// Which policy stands in for pi in the sample-form advantage backup:
/// the greedy policy (expectation -> max, the default) or the current
/// epsilon-greedy behavior distribution.
enum class AdvantagePolicy { Greedy, Behavior };

/// Step-size rule: fixed lambda, or 1/N(s,a) per visited pair.
enum class StepSizeRule { Constant, InverseVisits };

struct LearnerConfig {
    double discount = 0.99; // gamma of the TD targets
    double step_size = 0.1; // lambda
    StepSizeRule step_size_rule = StepSizeRule::Constant;
    double epsilon = 1.0;
    double epsilon_decay = 0.999; // multiplicative, per episode
    double min_epsilon = 0.01;
    int episodes = 1000;
    int max_steps_per_episode = 200;
    std::uint64_t seed = 0;
    BackupKind backup = BackupKind::Classical;
    BetaSchedule beta = BetaSchedule::family(1); // Advantage only, indexed by episode
    AdvantagePolicy advantage_pi = AdvantagePolicy::Greedy;
};

/// Throws std::invalid_argument on out-of-range fields.
void validate_learner_config(const LearnerConfig& config);

struct EpisodeLog {
    int episode_index = 0; // 1-based
    double total_reward = 0.0;
    int steps = 0;
};

/// Q table over a possibly huge discretized state space. Rows materialize
/// on first touch at default_value; iteration follows insertion order, so
/// exports are deterministic given the trajectory history.
class SparseQTable {
public:
    SparseQTable(int n_actions, double default_value = 0.0);

    int n_actions() const { return n_actions_; }
    double default_value() const { return default_value_; }
    std::size_t n_rows() const { return states_.size(); }

    /// Mutable row, inserting a default row on first access.
    std::span<double> row(std::int64_t state);
    /// Read-only row; absent states read as the default row.
    std::span<const double> peek_row(std::int64_t state) const;
    double at(std::int64_t state, int action) const;

    /// States in insertion order.
    const std::vector<std::int64_t>& states() const { return states_; }

    /// Lowest-index argmax of the row (default row gives action 0).
    int greedy_action(std::int64_t state) const;

    /// Dense copy for small spaces.
    ActionValueFn to_dense(int n_states) const;

private:
    int n_actions_;
    double default_value_;
    std::unordered_map<std::int64_t, std::size_t> index_;
    std::vector<std::int64_t> states_;
    std::vector<double> values_;
    std::vector<double> default_row_;
};

/// Epsilon-greedy over one Q row: with probability epsilon a uniform
/// action, otherwise the lowest-index argmax.
int epsilon_greedy_action(std::span<const double> q_row, double epsilon, SplitMix64& rng);

enum class McMode { FirstVisit, EveryVisit, Incremental };

/// Monte Carlo policy evaluation over sampled episodes. FirstVisit and
/// EveryVisit keep total-return / visit-count averages; Incremental applies
/// v += (G - v)/N at every visit.
StateValueFn mc_policy_evaluation(TabularEnv& env, const Policy& policy, double discount,
                                  int episodes, McMode mode, std::uint64_t seed,
                                  int max_steps_per_episode = 1000);

/// TD(0) evaluation; terminal next-states bootstrap to zero.
StateValueFn td0_policy_evaluation(TabularEnv& env, const Policy& policy, double step_size,
                                   double discount, int episodes, std::uint64_t seed,
                                   int max_steps_per_episode = 1000,
                                   StepSizeRule rule = StepSizeRule::Constant);

/// n-step return target: sum_i gamma^i rewards[i] + gamma^n v_tail, with
/// n = rewards.size(). One reward gives the TD(0) target.
double n_step_td_target(std::span<const double> rewards, double v_tail, double discount);

struct LearnResult {
    SparseQTable q;
    std::vector<EpisodeLog> episodes;
};

/// On-policy TD control; the next action is drawn by the same
/// epsilon-greedy rule that acts.
LearnResult sarsa(TabularEnv& env, const LearnerConfig& config);

/// Off-policy TD control with a pluggable backup target:
///   Classical:  R + g max_a' Q(s',a')
///   Consistent: R + g [s'==s ? Q(s,a) : max_a' Q(s',a')]
///   Advantage:  classical target + beta_j [Q(s,a) - max_b Q(s,b)]
/// (beta_j from the schedule at the episode index; the bracketed advantage
/// uses the behavior distribution instead of the max when advantage_pi is
/// Behavior). Terminal next-states drop only the gamma-term.
LearnResult q_learning(TabularEnv& env, const LearnerConfig& config);

/// One sampled (state, action, reward) trajectory under the policy.
struct SampledEpisode {
    std::vector<std::int64_t> states;
    std::vector<int> actions;
    std::vector<double> rewards; // rewards[t] follows (states[t], actions[t])
    bool truncated = false;
};

SampledEpisode sample_episode(TabularEnv& env, const Policy& policy, SplitMix64& rng,
                              int max_steps);

} // namespace rlops
