#include "rlops/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rlops {

namespace {

void check_v_shape(const TabularMdp& mdp, const StateValueFn& v) {
    if (v.size() != mdp.n_states())
        throw std::invalid_argument("operator: state-value table shape mismatch");
}

void check_q_shape(const TabularMdp& mdp, const ActionValueFn& q) {
    if (q.n_states != mdp.n_states() || q.n_actions != mdp.n_actions())
        throw std::invalid_argument("operator: action-value table shape mismatch");
}

void check_policy_shape(const TabularMdp& mdp, const Policy& policy) {
    if (policy.n_states != mdp.n_states() || policy.n_actions != mdp.n_actions())
        throw std::invalid_argument("operator: policy shape mismatch");
}

// Per-next-state aggregates shared by the Q-space operators.
std::vector<double> policy_averaged(const ActionValueFn& q, const Policy& policy) {
    std::vector<double> m(q.n_states);
    for (int s = 0; s < q.n_states; ++s) {
        double acc = 0.0;
        for (int a = 0; a < q.n_actions; ++a) acc += policy.at(s, a) * q.at(s, a);
        m[static_cast<std::size_t>(s)] = acc;
    }
    return m;
}

std::vector<double> row_max(const ActionValueFn& q) {
    std::vector<double> m(q.n_states);
    for (int s = 0; s < q.n_states; ++s) {
        auto row = q.row(s);
        m[static_cast<std::size_t>(s)] = *std::max_element(row.begin(), row.end());
    }
    return m;
}

} // namespace

StateValueFn apply_expectation_v(const TabularMdp& mdp, const Policy& policy, const StateValueFn& v) {
    check_v_shape(mdp, v);
    check_policy_shape(mdp, policy);
    const double g = mdp.discount();
    StateValueFn out = StateValueFn::zeros(mdp.n_states());
    for (int s = 0; s < mdp.n_states(); ++s) {
        double acc = 0.0;
        for (int a = 0; a < mdp.n_actions(); ++a) {
            auto row = mdp.transition_row(s, a);
            double lookahead = 0.0;
            for (int s2 = 0; s2 < mdp.n_states(); ++s2) lookahead += row[s2] * v[s2];
            acc += policy.at(s, a) * (mdp.r(s, a) + g * lookahead);
        }
        out[s] = acc;
    }
    return out;
}

ActionValueFn apply_expectation_q(const TabularMdp& mdp, const Policy& policy, const ActionValueFn& q) {
    check_q_shape(mdp, q);
    check_policy_shape(mdp, policy);
    const double g = mdp.discount();
    const std::vector<double> m = policy_averaged(q, policy);
    ActionValueFn out = ActionValueFn::zeros(mdp.n_states(), mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            auto row = mdp.transition_row(s, a);
            double lookahead = 0.0;
            for (int s2 = 0; s2 < mdp.n_states(); ++s2) lookahead += row[s2] * m[s2];
            out.at(s, a) = mdp.r(s, a) + g * lookahead;
        }
    }
    return out;
}

StateValueFn apply_optimality_v(const TabularMdp& mdp, const StateValueFn& v) {
    check_v_shape(mdp, v);
    const double g = mdp.discount();
    StateValueFn out = StateValueFn::zeros(mdp.n_states());
    for (int s = 0; s < mdp.n_states(); ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.n_actions(); ++a) {
            auto row = mdp.transition_row(s, a);
            double lookahead = 0.0;
            for (int s2 = 0; s2 < mdp.n_states(); ++s2) lookahead += row[s2] * v[s2];
            best = std::max(best, mdp.r(s, a) + g * lookahead);
        }
        out[s] = best;
    }
    return out;
}

ActionValueFn apply_optimality_q(const TabularMdp& mdp, const ActionValueFn& q) {
    check_q_shape(mdp, q);
    const double g = mdp.discount();
    const std::vector<double> mx = row_max(q);
    ActionValueFn out = ActionValueFn::zeros(mdp.n_states(), mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            auto row = mdp.transition_row(s, a);
            double lookahead = 0.0;
            for (int s2 = 0; s2 < mdp.n_states(); ++s2) lookahead += row[s2] * mx[s2];
            out.at(s, a) = mdp.r(s, a) + g * lookahead;
        }
    }
    return out;
}

ActionValueFn apply_consistent_q(const TabularMdp& mdp, const ActionValueFn& q) {
    check_q_shape(mdp, q);
    const double g = mdp.discount();
    const std::vector<double> mx = row_max(q);
    ActionValueFn out = ActionValueFn::zeros(mdp.n_states(), mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            auto row = mdp.transition_row(s, a);
            double lookahead = 0.0;
            for (int s2 = 0; s2 < mdp.n_states(); ++s2) lookahead += row[s2] * mx[s2];
            // Self-transition backs up the current entry, not the max.
            lookahead += row[s] * (q.at(s, a) - mx[s]);
            out.at(s, a) = mdp.r(s, a) + g * lookahead;
        }
    }
    return out;
}

ActionValueFn apply_advantage_q(const TabularMdp& mdp, const Policy& policy, const ActionValueFn& q,
                                double beta_value) {
    check_q_shape(mdp, q);
    check_policy_shape(mdp, policy);
    if (!(beta_value >= 0.0)) throw std::invalid_argument("apply_advantage_q: beta must be >= 0");
    const double g = mdp.discount();
    const std::vector<double> m = policy_averaged(q, policy);
    ActionValueFn out = ActionValueFn::zeros(mdp.n_states(), mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            auto row = mdp.transition_row(s, a);
            double lookahead = 0.0;
            for (int s2 = 0; s2 < mdp.n_states(); ++s2) lookahead += row[s2] * m[s2];
            const double advantage = q.at(s, a) - m[static_cast<std::size_t>(s)];
            out.at(s, a) = mdp.r(s, a) + g * lookahead + beta_value * advantage;
        }
    }
    return out;
}

BetaSchedule BetaSchedule::family(int k) {
    if (k < 1) throw std::invalid_argument("BetaSchedule::family: index must be >= 1");
    BetaSchedule s;
    s.mode = Mode::PerIteration;
    s.family_index = k;
    return s;
}

BetaSchedule BetaSchedule::constant_beta(double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("BetaSchedule::constant_beta: beta must be >= 0");
    BetaSchedule s;
    s.mode = Mode::Constant;
    s.constant = beta;
    return s;
}

double beta_at(const BetaSchedule& schedule, int j) {
    if (j < 1) throw std::invalid_argument("beta_at: iteration index must be >= 1");
    if (schedule.mode == BetaSchedule::Mode::Constant) return schedule.constant;
    return 1.0 / std::pow(static_cast<double>(j), schedule.family_index + 1);
}

OperatorKind OperatorKind::expectation_v(Policy policy) {
    return {OperatorVariant::ExpectationV, std::move(policy), std::nullopt, false};
}
OperatorKind OperatorKind::expectation_q(Policy policy) {
    return {OperatorVariant::ExpectationQ, std::move(policy), std::nullopt, false};
}
OperatorKind OperatorKind::optimality_v() {
    return {OperatorVariant::OptimalityV, std::nullopt, std::nullopt, false};
}
OperatorKind OperatorKind::optimality_q() {
    return {OperatorVariant::OptimalityQ, std::nullopt, std::nullopt, false};
}
OperatorKind OperatorKind::consistent_q() {
    return {OperatorVariant::ConsistentQ, std::nullopt, std::nullopt, false};
}
OperatorKind OperatorKind::advantage_q(Policy policy, BetaSchedule beta) {
    return {OperatorVariant::AdvantageQ, std::move(policy), beta, false};
}
OperatorKind OperatorKind::advantage_q_greedy(BetaSchedule beta) {
    return {OperatorVariant::AdvantageQ, std::nullopt, beta, true};
}

void validate_operator_kind(const OperatorKind& kind) {
    switch (kind.variant) {
    case OperatorVariant::ExpectationV:
    case OperatorVariant::ExpectationQ:
        if (!kind.policy) throw std::invalid_argument("expectation operator requires a policy");
        break;
    case OperatorVariant::AdvantageQ:
        if (!kind.beta) throw std::invalid_argument("advantage operator requires a beta schedule");
        if (!kind.policy && !kind.greedy_policy_mode)
            throw std::invalid_argument("advantage operator requires a policy or greedy mode");
        break;
    default:
        break;
    }
}

bool is_q_operator(const OperatorKind& kind) {
    return kind.variant != OperatorVariant::ExpectationV && kind.variant != OperatorVariant::OptimalityV;
}

std::string operator_name(const OperatorKind& kind) {
    switch (kind.variant) {
    case OperatorVariant::ExpectationV: return "expectation-v";
    case OperatorVariant::ExpectationQ: return "expectation";
    case OperatorVariant::OptimalityV: return "bellman-v";
    case OperatorVariant::OptimalityQ: return "bellman";
    case OperatorVariant::ConsistentQ: return "consistent";
    case OperatorVariant::AdvantageQ: return "advantage";
    }
    return "unknown";
}

ActionValueFn apply_q(const OperatorKind& kind, const TabularMdp& mdp, const ActionValueFn& q,
                      int iteration) {
    validate_operator_kind(kind);
    switch (kind.variant) {
    case OperatorVariant::ExpectationQ:
        return apply_expectation_q(mdp, *kind.policy, q);
    case OperatorVariant::OptimalityQ:
        return apply_optimality_q(mdp, q);
    case OperatorVariant::ConsistentQ:
        return apply_consistent_q(mdp, q);
    case OperatorVariant::AdvantageQ: {
        const double beta = beta_at(*kind.beta, iteration);
        if (kind.greedy_policy_mode)
            return apply_advantage_q(mdp, greedy_policy(q), q, beta);
        return apply_advantage_q(mdp, *kind.policy, q, beta);
    }
    default:
        throw std::invalid_argument("apply_q: not an action-value operator");
    }
}

StateValueFn apply_v(const OperatorKind& kind, const TabularMdp& mdp, const StateValueFn& v) {
    validate_operator_kind(kind);
    switch (kind.variant) {
    case OperatorVariant::ExpectationV:
        return apply_expectation_v(mdp, *kind.policy, v);
    case OperatorVariant::OptimalityV:
        return apply_optimality_v(mdp, v);
    default:
        throw std::invalid_argument("apply_v: not a state-value operator");
    }
}

std::function<ActionValueFn(const ActionValueFn&)> make_q_operator(OperatorKind kind, TabularMdp mdp,
                                                                   int iteration) {
    validate_operator_kind(kind);
    return [kind = std::move(kind), mdp = std::move(mdp), iteration](const ActionValueFn& q) {
        return apply_q(kind, mdp, q, iteration);
    };
}

std::function<StateValueFn(const StateValueFn&)> make_v_operator(OperatorKind kind, TabularMdp mdp) {
    validate_operator_kind(kind);
    return [kind = std::move(kind), mdp = std::move(mdp)](const StateValueFn& v) {
        return apply_v(kind, mdp, v);
    };
}

} // namespace rlops
