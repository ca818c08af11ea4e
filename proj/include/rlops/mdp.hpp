#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rlops/rng.hpp"

namespace rlops {

/// Dense per-state value table (v in the usual notation).
struct StateValueFn {
    std::vector<double> values;

    StateValueFn() = default;
    explicit StateValueFn(std::vector<double> v) : values(std::move(v)) {}

    static StateValueFn zeros(int n_states) { return StateValueFn(std::vector<double>(n_states, 0.0)); }

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int s) const { return values[static_cast<std::size_t>(s)]; }
    double& operator[](int s) { return values[static_cast<std::size_t>(s)]; }
};

/// Dense per-(state, action) value table (q), row-major in the state index.
struct ActionValueFn {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> values;

    ActionValueFn() = default;
    ActionValueFn(int ns, int na, std::vector<double> v)
        : n_states(ns), n_actions(na), values(std::move(v)) {}

    static ActionValueFn zeros(int n_states, int n_actions) {
        return ActionValueFn(n_states, n_actions,
                             std::vector<double>(static_cast<std::size_t>(n_states) * n_actions, 0.0));
    }

    double at(int s, int a) const { return values[static_cast<std::size_t>(s) * n_actions + a]; }
    double& at(int s, int a) { return values[static_cast<std::size_t>(s) * n_actions + a]; }
    std::span<const double> row(int s) const {
        return {values.data() + static_cast<std::size_t>(s) * n_actions, static_cast<std::size_t>(n_actions)};
    }
};

/// Stochastic tabular policy: probs[s * n_actions + a] = pi(a|s).
struct Policy {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> probs;

    Policy() = default;
    Policy(int ns, int na, std::vector<double> p) : n_states(ns), n_actions(na), probs(std::move(p)) {}

    static Policy uniform(int n_states, int n_actions);
    /// Point-mass rows: probability 1 on actions[s].
    static Policy deterministic(const std::vector<int>& actions, int n_actions);

    double at(int s, int a) const { return probs[static_cast<std::size_t>(s) * n_actions + a]; }
    std::span<const double> row(int s) const {
        return {probs.data() + static_cast<std::size_t>(s) * n_actions, static_cast<std::size_t>(n_actions)};
    }

    /// For deterministic policies: the action carrying the row's mass
    /// (argmax of the row, lowest index on ties).
    int action(int s) const;
};

/// Finite MDP <S, A, p, r, gamma> with the transition kernel and reward
/// stored in (s, a, s') form. The marginal reward r(s, a) is derived on
/// construction as sum_{s'} p(s'|s,a) * reward(s,a,s') and cached, together
/// with the reward bound r_max = max |reward|.
///
/// Construction never validates; validate_mdp reports violations so that
/// malformed instances can be diagnosed rather than rejected blindly.
/// Instances are immutable after construction and safe to share across
/// threads.
class TabularMdp {
public:
    TabularMdp() = default;
    TabularMdp(int n_states, int n_actions, std::vector<double> transition,
               std::vector<double> reward, double discount);

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }
    double discount() const { return discount_; }
    double r_max() const { return r_max_; }

    double p(int s, int a, int s2) const { return transition_[idx3(s, a, s2)]; }
    double r3(int s, int a, int s2) const { return reward_[idx3(s, a, s2)]; }
    /// Expected immediate reward r(s, a).
    double r(int s, int a) const { return reward_sa_[static_cast<std::size_t>(s) * n_actions_ + a]; }

    std::span<const double> transition_row(int s, int a) const {
        return {transition_.data() + idx3(s, a, 0), static_cast<std::size_t>(n_states_)};
    }
    std::span<const double> transition_raw() const { return transition_; }
    std::span<const double> reward_raw() const { return reward_; }

private:
    std::size_t idx3(int s, int a, int s2) const {
        return (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_ + s2;
    }

    int n_states_ = 0;
    int n_actions_ = 0;
    std::vector<double> transition_; // (s, a, s')
    std::vector<double> reward_;     // (s, a, s')
    std::vector<double> reward_sa_;  // cached expectation r(s, a)
    double discount_ = 0.0;
    double r_max_ = 0.0;
};

/// Sup norm on value tables; the metric behind every contraction argument.
double sup_norm(const StateValueFn& v);
double sup_norm(const ActionValueFn& q);
double sup_norm(std::span<const double> xs);

double sup_distance(const StateValueFn& a, const StateValueFn& b);
double sup_distance(const ActionValueFn& a, const ActionValueFn& b);
double sup_distance(const std::vector<double>& a, const std::vector<double>& b);
inline double sup_distance(double a, double b) { return a < b ? b - a : a - b; }

bool is_finite(const StateValueFn& v);
bool is_finite(const ActionValueFn& q);
bool is_finite(const std::vector<double>& xs);
bool is_finite(double x);

/// Function-object form of the sup metric, usable wherever a metric is a
/// template parameter.
struct SupNormMetric {
    template <class Table>
    double operator()(const Table& a, const Table& b) const {
        return sup_distance(a, b);
    }
};

/// One failed MDP invariant. state/action are -1 when not applicable.
struct MdpViolation {
    int state = -1;
    int action = -1;
    std::string constraint;
};

/// Checks row-stochasticity (tolerance 1e-12), probability bounds,
/// discount in [0,1) and reward finiteness. Empty report means valid.
std::vector<MdpViolation> validate_mdp(const TabularMdp& mdp);

/// Seeded random MDP: transition rows are normalized uniform draws,
/// rewards uniform in [-1, 1]. Identical seed, identical MDP.
TabularMdp random_mdp(int n_states, int n_actions, double discount, std::uint64_t seed);

/// G = sum_k discount^k * rewards[k]; empty sequence gives 0.
double discounted_return(std::span<const double> rewards, double discount);

/// v(s) = sum_a pi(a|s) q(s, a).
StateValueFn state_values_from_q(const ActionValueFn& q, const Policy& policy);

/// Deterministic policy on the per-state argmax of q, lowest index on ties.
Policy greedy_policy(const ActionValueFn& q);
std::vector<int> greedy_actions(const ActionValueFn& q);

/// Canonical two-state fixture used throughout the test suites:
/// s0 --a0--> s0 reward 0, s0 --a1--> s1 reward 1, s1 absorbing reward 0,
/// gamma = 0.5. Solvable by hand: V* = (1, 0), Q* = ((0.5, 1), (0, 0)).
TabularMdp two_state_mdp();

/// Plain-text fixture format:
///   mdp <n_states> <n_actions> <gamma>
///   <s> <a>  <p(0)> ... <p(n-1)>  <r(0)> ... <r(n-1)>
/// one line per (s, a), '#' starts a comment.
TabularMdp load_mdp(std::istream& in);
TabularMdp load_mdp_file(const std::string& path);
void save_mdp(const TabularMdp& mdp, std::ostream& out);
void save_mdp_file(const TabularMdp& mdp, const std::string& path);

} // namespace rlops
