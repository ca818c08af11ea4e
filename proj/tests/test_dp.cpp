#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rlops/dp.hpp"
#include "test_util.hpp"

using namespace rlops;

namespace {

TabularMdp zero_reward_mdp(std::uint64_t seed) {
    const TabularMdp base = random_mdp(5, 3, 0.9, seed);
    std::vector<double> transition(base.transition_raw().begin(), base.transition_raw().end());
    return TabularMdp(5, 3, std::move(transition), std::vector<double>(5 * 3 * 5, 0.0), 0.9);
}

} // namespace

TEST_CASE("policy evaluation on trivial and hand-solved cases") {
    const TabularMdp zero = zero_reward_mdp(3);
    const StateValueFn v0 = policy_evaluation(zero, Policy::uniform(5, 3));
    CHECK(sup_norm(v0) == 0.0);

    const TabularMdp two = two_state_mdp();
    const StateValueFn v = policy_evaluation(two, Policy::uniform(2, 2), 1e-10);
    CHECK(v[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
    CHECK(v[1] == doctest::Approx(0.0));
}

TEST_CASE("policy evaluation surfaces non-convergence") {
    CHECK_THROWS_AS(policy_evaluation(two_state_mdp(), Policy::uniform(2, 2), 1e-10, 1),
                    std::runtime_error);
}

TEST_CASE("iterative evaluation matches the linear-solve oracle") {
    const TabularMdp mdp = random_mdp(8, 3, 0.9, 3);
    const Policy pi = test::random_policy(8, 3, 4);
    const double tol = 1e-9;
    const StateValueFn iterative = policy_evaluation(mdp, pi, tol);
    const StateValueFn exact = policy_evaluation_exact(mdp, pi);
    CHECK(sup_distance(iterative, exact) <= 10 * tol);
}

TEST_CASE("exact evaluation closed forms") {
    const TabularMdp zero = zero_reward_mdp(5);
    CHECK(sup_norm(policy_evaluation_exact(zero, Policy::uniform(5, 3))) <= 1e-12);

    const TabularMdp two = two_state_mdp();
    const StateValueFn v = policy_evaluation_exact(two, Policy::uniform(2, 2));
    CHECK(v[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(0.0));

    // Single self-loop, reward 1, gamma 0.9: geometric series sums to 10.
    const TabularMdp loop(1, 1, {1.0}, {1.0}, 0.9);
    CHECK(policy_evaluation_exact(loop, Policy::uniform(1, 1))[0] ==
          doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("policy improvement") {
    const TabularMdp two = two_state_mdp();
    const auto [greedy_on_r, q_r] = policy_improvement(two, StateValueFn::zeros(2));
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) CHECK(q_r.at(s, a) == doctest::Approx(two.r(s, a)));
    CHECK(greedy_on_r.action(0) == 1);

    const auto [pi_star, q_star] = policy_improvement(two, StateValueFn({1.0, 0.0}));
    CHECK(q_star.at(0, 0) == doctest::Approx(0.5));
    CHECK(q_star.at(0, 1) == doctest::Approx(1.0));
    CHECK(q_star.at(1, 0) == doctest::Approx(0.0));
    CHECK(q_star.at(1, 1) == doctest::Approx(0.0));
    CHECK(pi_star.action(0) == 1);

    CHECK_THROWS_AS(policy_improvement(two, StateValueFn::zeros(3)), std::invalid_argument);
}

TEST_CASE("one improvement step never hurts") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const TabularMdp mdp = random_mdp(6, 3, 0.9, seed * 31);
        const Policy uniform = Policy::uniform(6, 3);
        const StateValueFn v_uniform = policy_evaluation_exact(mdp, uniform);
        const auto [improved, q] = policy_improvement(mdp, v_uniform);
        const StateValueFn v_improved = policy_evaluation_exact(mdp, improved);
        for (int s = 0; s < 6; ++s) CHECK(v_improved[s] >= v_uniform[s] - 1e-10);
    }
}

TEST_CASE("policy iteration solves the two-state fixture quickly") {
    const auto result = policy_iteration(two_state_mdp(), 1e-10);
    CHECK(result.sweeps <= 3);
    CHECK(result.policy.action(0) == 1);
    CHECK(result.state_values[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(result.state_values[1] == doctest::Approx(0.0));
    CHECK(greedy_actions(result.action_values) ==
          std::vector<int>{result.policy.action(0), result.policy.action(1)});
    CHECK(static_cast<int>(result.evaluation_residuals.size()) == result.sweeps);
}

TEST_CASE("policy iteration stops immediately when actions are indistinguishable") {
    // Both actions share the same rows, so the first improvement is final.
    std::vector<double> p = {0.3, 0.7, 0.3, 0.7, 1.0, 0.0, 1.0, 0.0};
    std::vector<double> r = {0.2, 1.0, 0.2, 1.0, -0.5, 0.0, -0.5, 0.0};
    const TabularMdp mdp(2, 2, std::move(p), std::move(r), 0.8);
    const auto result = policy_iteration(mdp, 1e-10);
    CHECK(result.sweeps <= 2);
    CHECK(result.policy.action(0) == 0); // tie-break on equal actions
    CHECK(result.policy.action(1) == 0);
}

TEST_CASE("policy iteration and value iteration agree") {
    const TabularMdp mdp = random_mdp(10, 4, 0.95, 11);
    const auto pi_result = policy_iteration(mdp, 1e-10);
    const auto vi_result = value_iteration(mdp, 1e-10);
    CHECK(sup_distance(pi_result.state_values, vi_result.values) <= 1e-6);
}

TEST_CASE("value iteration basics") {
    const TabularMdp zero = zero_reward_mdp(7);
    const auto zero_result = value_iteration(zero);
    CHECK(sup_norm(zero_result.values) == 0.0);
    for (int s = 0; s < 5; ++s) CHECK(zero_result.policy.action(s) == 0);

    const auto two_result = value_iteration(two_state_mdp(), 1e-10);
    CHECK(two_result.converged);
    CHECK(two_result.values[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(two_result.values[1] == doctest::Approx(0.0));
    CHECK(two_result.policy.action(0) == 1);
}

TEST_CASE("value iteration residuals respect the geometric envelope") {
    const TabularMdp mdp = random_mdp(9, 3, 0.9, 13);
    const auto result = value_iteration(mdp, 1e-9);
    REQUIRE(result.converged);
    const double r0 = result.residual_history.front();
    double power = 1.0;
    for (std::size_t n = 0; n < result.residual_history.size(); ++n) {
        CHECK(result.residual_history[n] <= power / (1.0 - 0.9) * r0 + 1e-9);
        power *= 0.9;
    }
}

TEST_CASE("oracle equivalence over random instances") {
    SplitMix64 rng(55);
    for (int i = 0; i < 10; ++i) {
        const int ns = 2 + rng.uniform_int(29), na = 1 + rng.uniform_int(5);
        const TabularMdp mdp = random_mdp(ns, na, 0.9, rng.next_u64());
        const Policy pi = test::random_policy(ns, na, rng.next_u64());
        const double tol = 1e-8;
        CHECK(sup_distance(policy_evaluation(mdp, pi, tol), policy_evaluation_exact(mdp, pi)) <=
              10 * tol);
    }
}

TEST_CASE("tie-broken random instances give identical policies across solvers") {
    SplitMix64 rng(56);
    for (int i = 0; i < 8; ++i) {
        const TabularMdp base = random_mdp(6 + rng.uniform_int(6), 2 + rng.uniform_int(3), 0.9,
                                           rng.next_u64());
        const TabularMdp mdp = test::perturb_rewards(base, 1e-6, rng.next_u64());
        const auto pi_result = policy_iteration(mdp, 1e-10);
        const auto vi_result = value_iteration(mdp, 1e-10);
        CHECK(sup_distance(pi_result.state_values, vi_result.values) <= 1e-6);
        for (int s = 0; s < mdp.n_states(); ++s)
            CHECK(pi_result.policy.action(s) == vi_result.policy.action(s));
    }
}

TEST_CASE("policy iteration improves monotonically across sweeps") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const TabularMdp mdp = random_mdp(7, 3, 0.9, seed * 41);
        Policy current = Policy::uniform(7, 3);
        StateValueFn previous = policy_evaluation_exact(mdp, current);
        for (int sweep = 0; sweep < 10; ++sweep) {
            const auto [improved, q] = policy_improvement(mdp, previous);
            const StateValueFn next = policy_evaluation_exact(mdp, improved);
            for (int s = 0; s < 7; ++s) CHECK(next[s] >= previous[s] - 1e-10);
            if (sup_distance(next, previous) < 1e-12) break;
            previous = next;
            current = improved;
        }
    }
}

TEST_CASE("optimal values stay inside the reward-scale bound") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const TabularMdp mdp = random_mdp(8, 3, 0.9, seed * 51);
        const auto result = value_iteration(mdp, 1e-9);
        CHECK(sup_norm(result.values) <= mdp.r_max() / (1.0 - mdp.discount()) + 1e-9);
    }
}
