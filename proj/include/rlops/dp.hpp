#pragma once

#include <vector>

#include "rlops/fixed_point.hpp"
#include "rlops/mdp.hpp"
#include "rlops/operators.hpp"

namespace rlops {

struct PolicyIterationResult {
    Policy policy; // deterministic, greedy w.r.t. action_values
    StateValueFn state_values;
    ActionValueFn action_values;
    int sweeps = 0;
    std::vector<std::vector<double>> evaluation_residuals; // one history per sweep
};

struct ValueIterationResult {
    StateValueFn values;
    Policy policy;
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
};

/// Fixed point of the expectation operator from the zero table.
StateValueFn policy_evaluation(const TabularMdp& mdp, const Policy& policy,
                               double tolerance = kDefaultTolerance,
                               int max_iter = kDefaultMaxIterations);

/// Exact v_pi by direct linear solve of (I - gamma P_pi) v = r_pi, where
/// P_pi and r_pi are the policy-averaged dynamics. Serves as the oracle for
/// the iterative path; gamma < 1 keeps the system nonsingular.
StateValueFn policy_evaluation_exact(const TabularMdp& mdp, const Policy& policy);

/// q(s,a) = r(s,a) + gamma sum_s' p(s'|s,a) v(s'), then the greedy policy.
std::pair<Policy, ActionValueFn> policy_improvement(const TabularMdp& mdp, const StateValueFn& v);

/// Alternates evaluation and improvement from the uniform policy until the
/// greedy policy is unchanged between sweeps.
PolicyIterationResult policy_iteration(const TabularMdp& mdp, double tolerance = kDefaultTolerance);

/// Fixed point of the optimality operator from the zero table, policy
/// extracted by one final improvement.
ValueIterationResult value_iteration(const TabularMdp& mdp, double tolerance = kDefaultTolerance,
                                     int max_iter = kDefaultMaxIterations);

} // namespace rlops
