#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rlops/analysis.hpp"
#include "rlops/fixed_point.hpp"
#include "rlops/operators.hpp"
#include "test_util.hpp"

using namespace rlops;

namespace {
const TabularMdp kTwoState = two_state_mdp();
const Policy kUniform2 = Policy::uniform(2, 2);

TabularMdp single_state_mdp(double reward, double gamma) {
    return TabularMdp(1, 1, {1.0}, {reward}, gamma);
}
} // namespace

TEST_CASE("expectation operator on v") {
    // v = 0 leaves only the policy-averaged immediate reward.
    const StateValueFn from_zero = apply_expectation_v(kTwoState, kUniform2, StateValueFn::zeros(2));
    CHECK(from_zero[0] == doctest::Approx(0.5));
    CHECK(from_zero[1] == doctest::Approx(0.0));

    const auto fp = iterate_to_fixed_point(
        [&](const StateValueFn& v) { return apply_expectation_v(kTwoState, kUniform2, v); },
        StateValueFn::zeros(2), 1e-10);
    REQUIRE(fp.converged);
    CHECK(fp.fixed_point[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
    CHECK(fp.fixed_point[1] == doctest::Approx(0.0));

    CHECK_THROWS_AS(apply_expectation_v(kTwoState, kUniform2, StateValueFn::zeros(3)),
                    std::invalid_argument);
}

TEST_CASE("expectation operator on q") {
    const ActionValueFn from_zero =
        apply_expectation_q(kTwoState, kUniform2, ActionValueFn::zeros(2, 2));
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) CHECK(from_zero.at(s, a) == doctest::Approx(kTwoState.r(s, a)));

    // gamma = 0 makes the operator the constant map to r.
    const TabularMdp myopic = random_mdp(4, 3, 0.0, 8);
    SplitMix64 rng(15);
    auto sampler = uniform_action_values(4, 3);
    const Policy pi = test::random_policy(4, 3, 77);
    const ActionValueFn out1 = apply_expectation_q(myopic, pi, sampler(rng));
    const ActionValueFn out2 = apply_expectation_q(myopic, pi, sampler(rng));
    CHECK(sup_distance(out1, out2) == 0.0);

    const auto fp = iterate_to_fixed_point(
        [&](const ActionValueFn& q) { return apply_expectation_q(kTwoState, kUniform2, q); },
        ActionValueFn::zeros(2, 2), 1e-10);
    REQUIRE(fp.converged);
    CHECK(fp.fixed_point.at(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-8)); // gamma * v_pi(s0)
    CHECK(fp.fixed_point.at(0, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fp.fixed_point.at(1, 0) == doctest::Approx(0.0));
    CHECK(fp.fixed_point.at(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("optimality operator on v") {
    const StateValueFn from_zero = apply_optimality_v(kTwoState, StateValueFn::zeros(2));
    CHECK(from_zero[0] == doctest::Approx(1.0)); // max_a r(s0, a)
    CHECK(from_zero[1] == doctest::Approx(0.0));

    const auto fp = iterate_to_fixed_point(
        [&](const StateValueFn& v) { return apply_optimality_v(kTwoState, v); },
        StateValueFn::zeros(2), 1e-10);
    REQUIRE(fp.converged);
    CHECK(fp.fixed_point[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fp.fixed_point[1] == doctest::Approx(0.0));

    const TabularMdp loop = single_state_mdp(1.0, 0.5);
    const auto loop_fp = iterate_to_fixed_point(
        [&](const StateValueFn& v) { return apply_optimality_v(loop, v); }, StateValueFn::zeros(1),
        1e-12);
    CHECK(loop_fp.fixed_point[0] == doctest::Approx(2.0).epsilon(1e-9)); // v = 1 + 0.5 v
}

TEST_CASE("optimality operator on q and the v/q consistency chain") {
    const ActionValueFn from_zero = apply_optimality_q(kTwoState, ActionValueFn::zeros(2, 2));
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) CHECK(from_zero.at(s, a) == doctest::Approx(kTwoState.r(s, a)));

    const auto fp = iterate_to_fixed_point(
        [&](const ActionValueFn& q) { return apply_optimality_q(kTwoState, q); },
        ActionValueFn::zeros(2, 2), 1e-10);
    REQUIRE(fp.converged);
    CHECK(fp.fixed_point.at(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(fp.fixed_point.at(0, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fp.fixed_point.at(1, 0) == doctest::Approx(0.0));
    CHECK(fp.fixed_point.at(1, 1) == doctest::Approx(0.0));

    // max_a Q*(s, a) must equal the fixed point of the state-value operator.
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const TabularMdp mdp = random_mdp(6, 3, 0.9, seed);
        const auto q_fp = iterate_to_fixed_point(
            [&](const ActionValueFn& q) { return apply_optimality_q(mdp, q); },
            ActionValueFn::zeros(6, 3), 1e-11);
        const auto v_fp = iterate_to_fixed_point(
            [&](const StateValueFn& v) { return apply_optimality_v(mdp, v); },
            StateValueFn::zeros(6), 1e-11);
        REQUIRE(q_fp.converged);
        REQUIRE(v_fp.converged);
        for (int s = 0; s < 6; ++s) {
            auto row = q_fp.fixed_point.row(s);
            const double vmax = *std::max_element(row.begin(), row.end());
            CHECK(vmax == doctest::Approx(v_fp.fixed_point[s]).epsilon(1e-8));
        }
    }
}

TEST_CASE("consistent operator equals the classical one without self-transitions") {
    const TabularMdp base = random_mdp(5, 3, 0.9, 33);
    const TabularMdp no_self = test::strip_self_transitions(base);
    SplitMix64 rng(71);
    auto sampler = uniform_action_values(5, 3);
    for (int trial = 0; trial < 50; ++trial) {
        const ActionValueFn q = sampler(rng);
        CHECK(sup_distance(apply_consistent_q(no_self, q), apply_optimality_q(no_self, q)) <=
              1e-12);
    }
}

TEST_CASE("consistent operator backs up the current entry on self-loops") {
    SplitMix64 rng(73);
    auto sampler = uniform_action_values(2, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const ActionValueFn f = sampler(rng);
        const ActionValueFn out = apply_consistent_q(kTwoState, f);
        // (s0, a0) is a pure self-loop with zero reward: T_c f = 0.5 f(s0, a0).
        CHECK(out.at(0, 0) == doctest::Approx(0.5 * f.at(0, 0)).epsilon(1e-12));
    }

    const auto fp = iterate_to_fixed_point(
        [&](const ActionValueFn& q) { return apply_consistent_q(kTwoState, q); },
        ActionValueFn::zeros(2, 2), 1e-10);
    REQUIRE(fp.converged);
    CHECK(fp.fixed_point.at(0, 0) == doctest::Approx(0.0));
    CHECK(fp.fixed_point.at(0, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fp.fixed_point.at(1, 0) == doctest::Approx(0.0));
    CHECK(fp.fixed_point.at(1, 1) == doctest::Approx(0.0));

    // Optimality preserved at s0, and the action gap widens from 0.5 to 1.
    CHECK(greedy_actions(fp.fixed_point)[0] == 1);
    const double v_consistent = std::max(fp.fixed_point.at(0, 0), fp.fixed_point.at(0, 1));
    CHECK(std::abs(fp.fixed_point.at(0, 0) - v_consistent) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("advantage operator hand values on the two-state fixture") {
    const ActionValueFn q(2, 2, {0.0, 1.0, 0.0, 0.0});
    const ActionValueFn out = apply_advantage_q(kTwoState, kUniform2, q, 0.5);
    CHECK(out.at(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.at(0, 1) == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(out.at(1, 0) == doctest::Approx(0.0));
    CHECK(out.at(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("advantage operator with beta zero is the expectation operator") {
    SplitMix64 rng(81);
    auto sampler = uniform_action_values(2, 2);
    for (int trial = 0; trial < 30; ++trial) {
        const ActionValueFn q = sampler(rng);
        const ActionValueFn advantage = apply_advantage_q(kTwoState, kUniform2, q, 0.0);
        const ActionValueFn expectation = apply_expectation_q(kTwoState, kUniform2, q);
        CHECK(advantage.values == expectation.values);
    }
}

TEST_CASE("advantage term vanishes on constant tables") {
    const TabularMdp mdp = random_mdp(5, 3, 0.8, 91);
    const Policy pi = test::random_policy(5, 3, 92);
    ActionValueFn constant = ActionValueFn::zeros(5, 3);
    for (double& x : constant.values) x = 3.7;
    const ActionValueFn advantage = apply_advantage_q(mdp, pi, constant, 2.0);
    const ActionValueFn expectation = apply_expectation_q(mdp, pi, constant);
    CHECK(sup_distance(advantage, expectation) <= 1e-12);
}

TEST_CASE("advantage operator is affine in beta") {
    const TabularMdp mdp = random_mdp(6, 2, 0.9, 101);
    const Policy pi = test::random_policy(6, 2, 102);
    SplitMix64 rng(103);
    auto sampler = uniform_action_values(6, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const ActionValueFn q = sampler(rng);
        const ActionValueFn base = apply_advantage_q(mdp, pi, q, 0.0);
        const double b1 = rng.uniform(0.1, 2.0), b2 = rng.uniform(2.1, 5.0);
        const ActionValueFn o1 = apply_advantage_q(mdp, pi, q, b1);
        const ActionValueFn o2 = apply_advantage_q(mdp, pi, q, b2);
        for (std::size_t i = 0; i < q.values.size(); ++i) {
            const double slope1 = (o1.values[i] - base.values[i]) / b1;
            const double slope2 = (o2.values[i] - base.values[i]) / b2;
            CHECK(slope1 == doctest::Approx(slope2).epsilon(1e-10));
        }
    }
}

TEST_CASE("advantage outputs obey the boundedness estimate") {
    const TabularMdp mdp = random_mdp(5, 4, 0.95, 111);
    const Policy pi = test::random_policy(5, 4, 112);
    SplitMix64 rng(113);
    auto sampler = uniform_action_values(5, 4);
    for (int trial = 0; trial < 50; ++trial) {
        const ActionValueFn q = sampler(rng);
        const double beta = rng.uniform(0.0, 3.0);
        const ActionValueFn out = apply_advantage_q(mdp, pi, q, beta);
        CHECK(sup_norm(out) <=
              mdp.r_max() + mdp.discount() * sup_norm(q) + 2.0 * beta * sup_norm(q) + 1e-9);
    }
}

TEST_CASE("beta schedules") {
    CHECK(beta_at(BetaSchedule::family(1), 1) == doctest::Approx(1.0));
    CHECK(beta_at(BetaSchedule::family(1), 10) == doctest::Approx(0.01));
    CHECK(beta_at(BetaSchedule::family(2), 2) == doctest::Approx(0.125));
    CHECK(beta_at(BetaSchedule::constant_beta(0.7), 123) == 0.7);
    CHECK_THROWS_AS(beta_at(BetaSchedule::family(1), 0), std::invalid_argument);
    CHECK_THROWS_AS(BetaSchedule::family(0), std::invalid_argument);
    CHECK_THROWS_AS(BetaSchedule::constant_beta(-1.0), std::invalid_argument);
}

TEST_CASE("operator kinds validate their attachments") {
    CHECK_THROWS_AS(apply_q(OperatorKind{OperatorVariant::ExpectationQ, std::nullopt, std::nullopt,
                                         false},
                            kTwoState, ActionValueFn::zeros(2, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_q(OperatorKind{OperatorVariant::AdvantageQ, std::nullopt, std::nullopt,
                                         false},
                            kTwoState, ActionValueFn::zeros(2, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_v(OperatorKind::optimality_q(), kTwoState, StateValueFn::zeros(2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_q(OperatorKind::optimality_v(), kTwoState, ActionValueFn::zeros(2, 2)),
                    std::invalid_argument);
    CHECK(operator_name(OperatorKind::optimality_q()) == "bellman");
    CHECK(operator_name(OperatorKind::consistent_q()) == "consistent");
    CHECK(operator_name(OperatorKind::advantage_q_greedy(BetaSchedule::family(1))) == "advantage");
    CHECK(operator_name(OperatorKind::expectation_q(kUniform2)) == "expectation");
}

TEST_CASE("five operator families contract and stay monotonic (spot check)") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const TabularMdp mdp = random_mdp(4 + static_cast<int>(seed), 3, 0.85, seed * 13);
        const Policy pi = test::random_policy(mdp.n_states(), 3, seed * 17);
        const std::vector<OperatorKind> kinds = {
            OperatorKind::expectation_v(pi), OperatorKind::expectation_q(pi),
            OperatorKind::optimality_v(),    OperatorKind::optimality_q(),
            OperatorKind::consistent_q(),
        };
        for (const auto& kind : kinds) {
            const auto contraction = check_contraction(kind, mdp, 200, seed * 19);
            CHECK_MESSAGE(!contraction.violation, operator_name(kind));
            const auto monotonic = check_monotonicity(kind, mdp, 200, seed * 23);
            CHECK_MESSAGE(monotonic.violations == 0, operator_name(kind));
        }
    }
}

TEST_CASE("a sup-norm expansion witness exists for the advantage operator") {
    bool found = false;
    for (std::uint64_t seed = 1; seed <= 50 && !found; ++seed) {
        const TabularMdp mdp = random_mdp(4, 2, 0.3, seed * 7);
        const Policy pi = Policy::uniform(4, 2);
        const auto check = check_contraction(
            OperatorKind::advantage_q(pi, BetaSchedule::constant_beta(1.0)), mdp, 300, seed);
        if (check.violation) found = true;
    }
    CHECK(found);
}
