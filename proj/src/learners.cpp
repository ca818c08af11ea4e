#include "rlops/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlops {

BackupKind backup_from_name(const std::string& name) {
    if (name == "bellman") return BackupKind::Classical;
    if (name == "consistent") return BackupKind::Consistent;
    if (name == "advantage") return BackupKind::Advantage;
    throw std::invalid_argument("unknown backup operator: " + name);
}

std::string backup_to_name(BackupKind kind) {
    switch (kind) {
    case BackupKind::Classical: return "bellman";
    case BackupKind::Consistent: return "consistent";
    case BackupKind::Advantage: return "advantage";
    }
    return "unknown";
}

void validate_learner_config(const LearnerConfig& config) {
    if (!(config.discount >= 0.0 && config.discount < 1.0))
        throw std::invalid_argument("learner config: discount must lie in [0, 1)");
    if (!(config.step_size > 0.0 && config.step_size <= 1.0))
        throw std::invalid_argument("learner config: step_size must lie in (0, 1]");
    if (!(config.epsilon >= 0.0 && config.epsilon <= 1.0))
        throw std::invalid_argument("learner config: epsilon must lie in [0, 1]");
    if (!(config.epsilon_decay > 0.0 && config.epsilon_decay <= 1.0))
        throw std::invalid_argument("learner config: epsilon_decay must lie in (0, 1]");
    if (config.min_epsilon < 0.0 || config.min_epsilon > 1.0)
        throw std::invalid_argument("learner config: min_epsilon must lie in [0, 1]");
    if (config.episodes < 1) throw std::invalid_argument("learner config: episodes must be >= 1");
    if (config.max_steps_per_episode < 1)
        throw std::invalid_argument("learner config: max_steps must be >= 1");
}

SparseQTable::SparseQTable(int n_actions, double default_value)
    : n_actions_(n_actions), default_value_(default_value),
      default_row_(static_cast<std::size_t>(n_actions), default_value) {
    if (n_actions < 1) throw std::invalid_argument("SparseQTable: n_actions must be >= 1");
}

std::span<double> SparseQTable::row(std::int64_t state) {
    auto it = index_.find(state);
    std::size_t offset;
    if (it == index_.end()) {
        offset = values_.size();
        index_.emplace(state, offset);
        states_.push_back(state);
        values_.insert(values_.end(), default_row_.begin(), default_row_.end());
    } else {
        offset = it->second;
    }
    return {values_.data() + offset, static_cast<std::size_t>(n_actions_)};
}

std::span<const double> SparseQTable::peek_row(std::int64_t state) const {
    auto it = index_.find(state);
    if (it == index_.end()) return {default_row_.data(), static_cast<std::size_t>(n_actions_)};
    return {values_.data() + it->second, static_cast<std::size_t>(n_actions_)};
}

double SparseQTable::at(std::int64_t state, int action) const { return peek_row(state)[action]; }

int SparseQTable::greedy_action(std::int64_t state) const {
    auto r = peek_row(state);
    return static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
}

ActionValueFn SparseQTable::to_dense(int n_states) const {
    ActionValueFn q(n_states, n_actions_,
                    std::vector<double>(static_cast<std::size_t>(n_states) * n_actions_,
                                        default_value_));
    for (std::int64_t s : states_) {
        if (s < 0 || s >= n_states) throw std::out_of_range("SparseQTable::to_dense: state index");
        auto r = peek_row(s);
        for (int a = 0; a < n_actions_; ++a) q.at(static_cast<int>(s), a) = r[a];
    }
    return q;
}

int epsilon_greedy_action(std::span<const double> q_row, double epsilon, SplitMix64& rng) {
    if (q_row.empty()) throw std::invalid_argument("epsilon_greedy_action: empty row");
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("epsilon_greedy_action: epsilon must lie in [0, 1]");
    if (epsilon > 0.0 && rng.next_double() < epsilon)
        return rng.uniform_int(static_cast<int>(q_row.size()));
    return static_cast<int>(std::max_element(q_row.begin(), q_row.end()) - q_row.begin());
}

SampledEpisode sample_episode(TabularEnv& env, const Policy& policy, SplitMix64& rng,
                              int max_steps) {
    if (policy.n_actions != env.n_actions())
        throw std::invalid_argument("sample_episode: policy action count mismatch");
    SampledEpisode episode;
    std::int64_t state = env.reset(rng);
    for (int t = 0; t < max_steps; ++t) {
        // Sample the policy row by inverse CDF.
        auto probs = policy.row(static_cast<int>(state));
        const double u = rng.next_double();
        int action = policy.n_actions - 1;
        double acc = 0.0;
        for (int a = 0; a < policy.n_actions; ++a) {
            acc += probs[a];
            if (u < acc) {
                action = a;
                break;
            }
        }
        const TabularStep step = env.step(action, rng);
        episode.states.push_back(state);
        episode.actions.push_back(action);
        episode.rewards.push_back(step.reward);
        state = step.next_state;
        if (step.terminal) return episode;
        if (step.truncated) break;
    }
    episode.truncated = true;
    return episode;
}

StateValueFn mc_policy_evaluation(TabularEnv& env, const Policy& policy, double discount,
                                  int episodes, McMode mode, std::uint64_t seed,
                                  int max_steps_per_episode) {
    if (episodes < 1) throw std::invalid_argument("mc_policy_evaluation: episodes must be >= 1");
    const auto n_states = static_cast<std::size_t>(env.n_states());
    StateValueFn v = StateValueFn::zeros(static_cast<int>(n_states));
    std::vector<double> total_return(n_states, 0.0);
    std::vector<long> visits(n_states, 0);
    SplitMix64 rng(seed);
    for (int ep = 0; ep < episodes; ++ep) {
        const SampledEpisode episode = sample_episode(env, policy, rng, max_steps_per_episode);
        const int T = static_cast<int>(episode.states.size());
        // Returns computed backward over the (possibly truncated) tail.
        std::vector<double> returns(T);
        double g = 0.0;
        for (int t = T - 1; t >= 0; --t) {
            g = episode.rewards[t] + discount * g;
            returns[t] = g;
        }
        std::vector<bool> seen(n_states, false);
        for (int t = 0; t < T; ++t) {
            const auto s = static_cast<std::size_t>(episode.states[t]);
            const bool first = !seen[s];
            seen[s] = true;
            switch (mode) {
            case McMode::FirstVisit:
                if (first) {
                    ++visits[s];
                    total_return[s] += returns[t];
                    v[static_cast<int>(s)] = total_return[s] / visits[s];
                }
                break;
            case McMode::EveryVisit:
                ++visits[s];
                total_return[s] += returns[t];
                v[static_cast<int>(s)] = total_return[s] / visits[s];
                break;
            case McMode::Incremental:
                ++visits[s];
                v[static_cast<int>(s)] += (returns[t] - v[static_cast<int>(s)]) / visits[s];
                break;
            }
        }
    }
    return v;
}

StateValueFn td0_policy_evaluation(TabularEnv& env, const Policy& policy, double step_size,
                                   double discount, int episodes, std::uint64_t seed,
                                   int max_steps_per_episode, StepSizeRule rule) {
    if (rule == StepSizeRule::Constant && !(step_size > 0.0 && step_size <= 1.0))
        throw std::invalid_argument("td0_policy_evaluation: step_size must lie in (0, 1]");
    if (episodes < 1) throw std::invalid_argument("td0_policy_evaluation: episodes must be >= 1");
    const auto n_states = static_cast<std::size_t>(env.n_states());
    StateValueFn v = StateValueFn::zeros(static_cast<int>(n_states));
    std::vector<long> visits(n_states, 0);
    SplitMix64 rng(seed);
    for (int ep = 0; ep < episodes; ++ep) {
        std::int64_t state = env.reset(rng);
        for (int t = 0; t < max_steps_per_episode; ++t) {
            auto probs = policy.row(static_cast<int>(state));
            const double u = rng.next_double();
            int action = policy.n_actions - 1;
            double acc = 0.0;
            for (int a = 0; a < policy.n_actions; ++a) {
                acc += probs[a];
                if (u < acc) {
                    action = a;
                    break;
                }
            }
            const TabularStep step = env.step(action, rng);
            const auto s = static_cast<int>(state);
            const double target =
                step.terminal ? step.reward
                              : step.reward + discount * v[static_cast<int>(step.next_state)];
            ++visits[static_cast<std::size_t>(s)];
            const double lambda = rule == StepSizeRule::InverseVisits
                                      ? 1.0 / visits[static_cast<std::size_t>(s)]
                                      : step_size;
            v[s] += lambda * (target - v[s]);
            state = step.next_state;
            if (step.terminal || step.truncated) break;
        }
    }
    return v;
}

double n_step_td_target(std::span<const double> rewards, double v_tail, double discount) {
    double acc = 0.0;
    double w = 1.0;
    for (double r : rewards) {
        acc += w * r;
        w *= discount;
    }
    return acc + w * v_tail;
}

namespace {

struct VisitCounter {
    std::unordered_map<std::int64_t, std::vector<long>> counts;
    int n_actions;

    explicit VisitCounter(int na) : n_actions(na) {}

    long bump(std::int64_t s, int a) {
        auto& row = counts[s];
        if (row.empty()) row.assign(static_cast<std::size_t>(n_actions), 0);
        return ++row[static_cast<std::size_t>(a)];
    }
};

double effective_step_size(const LearnerConfig& config, VisitCounter& counter, std::int64_t s,
                           int a) {
    if (config.step_size_rule == StepSizeRule::InverseVisits)
        return 1.0 / static_cast<double>(counter.bump(s, a));
    return config.step_size;
}

// Expectation of a Q row under the epsilon-greedy distribution.
double behavior_expectation(std::span<const double> row, double epsilon) {
    const double mx = *std::max_element(row.begin(), row.end());
    double mean = 0.0;
    for (double x : row) mean += x;
    mean /= static_cast<double>(row.size());
    return epsilon * mean + (1.0 - epsilon) * mx;
}

} // namespace

LearnResult sarsa(TabularEnv& env, const LearnerConfig& config) {
    validate_learner_config(config);
    SplitMix64 rng(config.seed);
    LearnResult result{SparseQTable(env.n_actions()), {}};
    result.episodes.reserve(static_cast<std::size_t>(config.episodes));
    VisitCounter visits(env.n_actions());
    double epsilon = config.epsilon;
    for (int ep = 1; ep <= config.episodes; ++ep) {
        std::int64_t state = env.reset(rng);
        int action = epsilon_greedy_action(result.q.row(state), epsilon, rng);
        double total = 0.0;
        int steps = 0;
        for (int t = 0; t < config.max_steps_per_episode; ++t) {
            TabularStep step;
            try {
                step = env.step(action, rng);
            } catch (const std::exception& e) {
                throw std::runtime_error("sarsa: episode " + std::to_string(ep) +
                                         ": " + e.what());
            }
            total += step.reward;
            ++steps;
            const double lambda = effective_step_size(config, visits, state, action);
            if (step.terminal) {
                auto row = result.q.row(state);
                row[action] += lambda * (step.reward - row[action]);
                break;
            }
            const int next_action =
                epsilon_greedy_action(result.q.row(step.next_state), epsilon, rng);
            const double bootstrap = result.q.at(step.next_state, next_action);
            auto row = result.q.row(state);
            row[action] += lambda * (step.reward + config.discount * bootstrap - row[action]);
            state = step.next_state;
            action = next_action;
            if (step.truncated) break;
        }
        result.episodes.push_back({ep, total, steps});
        epsilon = std::max(config.min_epsilon, epsilon * config.epsilon_decay);
    }
    return result;
}

LearnResult q_learning(TabularEnv& env, const LearnerConfig& config) {
    validate_learner_config(config);
    SplitMix64 rng(config.seed);
    LearnResult result{SparseQTable(env.n_actions()), {}};
    result.episodes.reserve(static_cast<std::size_t>(config.episodes));
    VisitCounter visits(env.n_actions());
    double epsilon = config.epsilon;
    for (int ep = 1; ep <= config.episodes; ++ep) {
        const double beta =
            config.backup == BackupKind::Advantage ? beta_at(config.beta, ep) : 0.0;
        std::int64_t state = env.reset(rng);
        double total = 0.0;
        int steps = 0;
        for (int t = 0; t < config.max_steps_per_episode; ++t) {
            const int action = epsilon_greedy_action(result.q.row(state), epsilon, rng);
            const TabularStep step = env.step(action, rng);
            total += step.reward;
            ++steps;

            const double q_sa = result.q.at(state, action);
            double target = step.reward;
            if (!step.terminal) {
                // gamma-term per backup kind.
                switch (config.backup) {
                case BackupKind::Classical:
                case BackupKind::Advantage: {
                    auto next_row = result.q.peek_row(step.next_state);
                    if (config.backup == BackupKind::Advantage &&
                        config.advantage_pi == AdvantagePolicy::Behavior)
                        target += config.discount * behavior_expectation(next_row, epsilon);
                    else
                        target += config.discount *
                                  *std::max_element(next_row.begin(), next_row.end());
                    break;
                }
                case BackupKind::Consistent: {
                    if (step.next_state == state) {
                        target += config.discount * q_sa;
                    } else {
                        auto next_row = result.q.peek_row(step.next_state);
                        target += config.discount *
                                  *std::max_element(next_row.begin(), next_row.end());
                    }
                    break;
                }
                }
            }
            if (config.backup == BackupKind::Advantage) {
                // Advantage correction stays even at terminal next-states.
                auto this_row = result.q.peek_row(state);
                const double baseline = config.advantage_pi == AdvantagePolicy::Behavior
                                            ? behavior_expectation(this_row, epsilon)
                                            : *std::max_element(this_row.begin(), this_row.end());
                target += beta * (q_sa - baseline);
            }
            const double lambda = effective_step_size(config, visits, state, action);
            auto row = result.q.row(state);
            row[action] += lambda * (target - row[action]);
            if (!std::isfinite(row[action]))
                throw std::runtime_error("q_learning: non-finite Q value at episode " +
                                         std::to_string(ep) + ", step " + std::to_string(t + 1));
            state = step.next_state;
            if (step.terminal || step.truncated) break;
        }
        result.episodes.push_back({ep, total, steps});
        epsilon = std::max(config.min_epsilon, epsilon * config.epsilon_decay);
    }
    return result;
}

} // namespace rlops
