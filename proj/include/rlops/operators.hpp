#pragma once

#include <functional>
#include <optional>
#include <string>

#include "rlops/mdp.hpp"

namespace rlops {

// The four operator families on value tables. All of them are pure: they
// read the MDP and the input table and return a fresh table.
//
//   expectation (state):   (T f)(s)   = sum_a pi(a|s) [r(s,a) + g sum_s' p f(s')]
//   expectation (action):  (T f)(s,a) = r(s,a) + g sum_s' p sum_a' pi(a'|s') f(s',a')
//   optimality (state):    (T f)(s)   = max_a [r(s,a) + g sum_s' p f(s')]
//   optimality (action):   (T f)(s,a) = r(s,a) + g sum_s' p max_a' f(s',a')
//   consistent (action):   as optimality, except self-transitions back up the
//                          current entry f(s,a) instead of the max
//   advantage (action):    expectation plus beta * [f(s,a) - sum_a pi(a|s) f(s,a)]
//
// The first five are gamma-contractions in the sup norm and monotonic; the
// advantage operator is neither in general (the test suites exhibit a
// violating pair) but is optimality-preserving and gap-increasing.

StateValueFn apply_expectation_v(const TabularMdp& mdp, const Policy& policy, const StateValueFn& v);
ActionValueFn apply_expectation_q(const TabularMdp& mdp, const Policy& policy, const ActionValueFn& q);
StateValueFn apply_optimality_v(const TabularMdp& mdp, const StateValueFn& v);
ActionValueFn apply_optimality_q(const TabularMdp& mdp, const ActionValueFn& q);
ActionValueFn apply_consistent_q(const TabularMdp& mdp, const ActionValueFn& q);
ActionValueFn apply_advantage_q(const TabularMdp& mdp, const Policy& policy, const ActionValueFn& q,
                                double beta_value);

/// Coefficient sequence for the advantage operator. PerIteration mode is the
/// family beta_{k,j} = 1 / j^(k+1), which is summable and tends to zero —
/// the conditions under which the operator sequence approaches the classical
/// one. Constant mode keeps beta fixed (convergence not guaranteed).
struct BetaSchedule {
    enum class Mode { PerIteration, Constant };

    Mode mode = Mode::PerIteration;
    int family_index = 1; // k in beta_{k,j} = 1/j^(k+1)
    double constant = 0.0;

    static BetaSchedule family(int k);
    static BetaSchedule constant_beta(double beta);
};

/// beta for iteration j >= 1 (1-based, episodes or operator sweeps).
double beta_at(const BetaSchedule& schedule, int j);

enum class OperatorVariant {
    ExpectationV,
    ExpectationQ,
    OptimalityV,
    OptimalityQ,
    ConsistentQ,
    AdvantageQ,
};

/// An operator family plus its attachments. ExpectationV/Q need a policy;
/// AdvantageQ needs a beta schedule and either a fixed policy or
/// greedy_policy_mode (the policy is recomputed from the current table on
/// every application, the optimality-style usage).
struct OperatorKind {
    OperatorVariant variant = OperatorVariant::OptimalityQ;
    std::optional<Policy> policy;
    std::optional<BetaSchedule> beta;
    bool greedy_policy_mode = false;

    static OperatorKind expectation_v(Policy policy);
    static OperatorKind expectation_q(Policy policy);
    static OperatorKind optimality_v();
    static OperatorKind optimality_q();
    static OperatorKind consistent_q();
    static OperatorKind advantage_q(Policy policy, BetaSchedule beta);
    static OperatorKind advantage_q_greedy(BetaSchedule beta);
};

/// Throws std::invalid_argument when a required attachment is missing.
void validate_operator_kind(const OperatorKind& kind);

bool is_q_operator(const OperatorKind& kind);

/// Canonical names used by the CLI and CSV outputs: `bellman`,
/// `expectation`, `consistent`, `advantage` (state-value variants get a
/// `-v` suffix).
std::string operator_name(const OperatorKind& kind);

/// Applies a Q-space operator kind; `iteration` (1-based) resolves
/// per-iteration beta schedules.
ActionValueFn apply_q(const OperatorKind& kind, const TabularMdp& mdp, const ActionValueFn& q,
                      int iteration = 1);
/// Applies a V-space operator kind.
StateValueFn apply_v(const OperatorKind& kind, const TabularMdp& mdp, const StateValueFn& v);

/// Closure forms for the fixed-point engine and the contraction probes.
/// The MDP (and kind) are captured by value.
std::function<ActionValueFn(const ActionValueFn&)> make_q_operator(OperatorKind kind, TabularMdp mdp,
                                                                   int iteration = 1);
std::function<StateValueFn(const StateValueFn&)> make_v_operator(OperatorKind kind, TabularMdp mdp);

} // namespace rlops
