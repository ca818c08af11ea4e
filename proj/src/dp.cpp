#include "rlops/dp.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace rlops {

StateValueFn policy_evaluation(const TabularMdp& mdp, const Policy& policy, double tolerance,
                               int max_iter) {
    auto result = iterate_to_fixed_point(
        [&](const StateValueFn& v) { return apply_expectation_v(mdp, policy, v); },
        StateValueFn::zeros(mdp.n_states()), tolerance, max_iter);
    if (!result.converged)
        throw std::runtime_error("policy_evaluation: no convergence within max_iter");
    return std::move(result.fixed_point);
}

StateValueFn policy_evaluation_exact(const TabularMdp& mdp, const Policy& policy) {
    const int n = mdp.n_states();
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd reward(n);
    for (int s = 0; s < n; ++s) {
        double r_pi = 0.0;
        for (int a = 0; a < mdp.n_actions(); ++a) {
            const double w = policy.at(s, a);
            r_pi += w * mdp.r(s, a);
            auto row = mdp.transition_row(s, a);
            for (int s2 = 0; s2 < n; ++s2) system(s, s2) -= mdp.discount() * w * row[s2];
        }
        reward(s) = r_pi;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    const Eigen::VectorXd v = lu.solve(reward);
    if (!v.allFinite())
        throw std::runtime_error("policy_evaluation_exact: linear solve failed");
    StateValueFn out = StateValueFn::zeros(n);
    for (int s = 0; s < n; ++s) out[s] = v(s);
    return out;
}

std::pair<Policy, ActionValueFn> policy_improvement(const TabularMdp& mdp, const StateValueFn& v) {
    if (v.size() != mdp.n_states())
        throw std::invalid_argument("policy_improvement: value table shape mismatch");
    ActionValueFn q = ActionValueFn::zeros(mdp.n_states(), mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            auto row = mdp.transition_row(s, a);
            double lookahead = 0.0;
            for (int s2 = 0; s2 < mdp.n_states(); ++s2) lookahead += row[s2] * v[s2];
            q.at(s, a) = mdp.r(s, a) + mdp.discount() * lookahead;
        }
    }
    return {greedy_policy(q), std::move(q)};
}

PolicyIterationResult policy_iteration(const TabularMdp& mdp, double tolerance) {
    PolicyIterationResult result;
    Policy current = Policy::uniform(mdp.n_states(), mdp.n_actions());
    std::vector<int> previous_actions; // empty on the first sweep
    while (true) {
        auto eval = iterate_to_fixed_point(
            [&](const StateValueFn& v) { return apply_expectation_v(mdp, current, v); },
            StateValueFn::zeros(mdp.n_states()), tolerance);
        result.evaluation_residuals.push_back(eval.residual_history);
        auto [improved, q] = policy_improvement(mdp, eval.fixed_point);
        const std::vector<int> actions = greedy_actions(q);
        ++result.sweeps;
        if (actions == previous_actions) {
            result.policy = std::move(improved);
            result.state_values = std::move(eval.fixed_point);
            result.action_values = std::move(q);
            return result;
        }
        previous_actions = actions;
        current = std::move(improved);
    }
}

ValueIterationResult value_iteration(const TabularMdp& mdp, double tolerance, int max_iter) {
    auto fp = iterate_to_fixed_point(
        [&](const StateValueFn& v) { return apply_optimality_v(mdp, v); },
        StateValueFn::zeros(mdp.n_states()), tolerance, max_iter);
    auto [policy, q] = policy_improvement(mdp, fp.fixed_point);
    ValueIterationResult result;
    result.values = std::move(fp.fixed_point);
    result.policy = std::move(policy);
    result.iterations = fp.iterations;
    result.residual_history = std::move(fp.residual_history);
    result.converged = fp.converged;
    return result;
}

} // namespace rlops
