#include "rlops/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rlops/csv.hpp"

namespace rlops {

ContractionCheck check_contraction(const OperatorKind& kind, const TabularMdp& mdp, int trials,
                                   std::uint64_t seed) {
    validate_operator_kind(kind);
    ContractionCheck check;
    check.operator_name = operator_name(kind);
    check.discount = mdp.discount();
    if (is_q_operator(kind)) {
        auto report = estimate_contraction_modulus(
            [&](const ActionValueFn& q) { return apply_q(kind, mdp, q, 1); },
            uniform_action_values(mdp.n_states(), mdp.n_actions()), trials, seed);
        check.estimated_modulus = report.estimated_modulus;
        check.sample_count = report.sample_count;
    } else {
        auto report = estimate_contraction_modulus(
            [&](const StateValueFn& v) { return apply_v(kind, mdp, v); },
            uniform_state_values(mdp.n_states()), trials, seed);
        check.estimated_modulus = report.estimated_modulus;
        check.sample_count = report.sample_count;
    }
    check.violation = check.estimated_modulus > mdp.discount() + kStrictnessMargin;
    return check;
}

MonotonicityCheck check_monotonicity(const OperatorKind& kind, const TabularMdp& mdp, int trials,
                                     std::uint64_t seed) {
    validate_operator_kind(kind);
    MonotonicityCheck check;
    check.operator_name = operator_name(kind);
    SplitMix64 rng(seed);
    if (is_q_operator(kind)) {
        auto sampler = uniform_action_values(mdp.n_states(), mdp.n_actions());
        for (int t = 0; t < trials; ++t) {
            ActionValueFn u = sampler(rng);
            ActionValueFn v = u;
            for (double& x : v.values) x += rng.uniform(0.0, 5.0);
            const ActionValueFn tu = apply_q(kind, mdp, u, 1);
            const ActionValueFn tv = apply_q(kind, mdp, v, 1);
            ++check.pairs;
            for (std::size_t i = 0; i < tu.values.size(); ++i)
                if (tu.values[i] > tv.values[i] + kStrictnessMargin) {
                    ++check.violations;
                    break;
                }
        }
    } else {
        auto sampler = uniform_state_values(mdp.n_states());
        for (int t = 0; t < trials; ++t) {
            StateValueFn u = sampler(rng);
            StateValueFn v = u;
            for (double& x : v.values) x += rng.uniform(0.0, 5.0);
            const StateValueFn tu = apply_v(kind, mdp, u);
            const StateValueFn tv = apply_v(kind, mdp, v);
            ++check.pairs;
            for (std::size_t i = 0; i < tu.values.size(); ++i)
                if (tu.values[i] > tv.values[i] + kStrictnessMargin) {
                    ++check.violations;
                    break;
                }
        }
    }
    return check;
}

OperatorFixedPoint iterate_q_operator(const OperatorKind& kind, const TabularMdp& mdp,
                                      double tolerance, int max_iter) {
    validate_operator_kind(kind);
    if (!is_q_operator(kind))
        throw std::invalid_argument("iterate_q_operator: requires an action-value operator");
    OperatorFixedPoint fp;
    fp.operator_name = operator_name(kind);
    ActionValueFn q = ActionValueFn::zeros(mdp.n_states(), mdp.n_actions());
    double residual = 0.0;
    int n = 0;
    // Per-iteration beta schedules and greedy-mode policies make the map
    // iteration-dependent, so the generic engine does not apply directly.
    for (n = 1; n <= max_iter; ++n) {
        ActionValueFn next = apply_q(kind, mdp, q, n);
        if (!is_finite(next))
            throw DivergenceError(n, "iterate_q_operator: non-finite table at iteration " +
                                         std::to_string(n));
        residual = sup_distance(next, q);
        q = std::move(next);
        if (residual < tolerance) break;
    }
    fp.converged = residual < tolerance;
    fp.iterations = std::min(n, max_iter);
    fp.final_residual = residual;
    const bool policy_average = kind.variant == OperatorVariant::AdvantageQ && !kind.greedy_policy_mode;
    fp.derivation =
        policy_average ? StateValueDerivation::PolicyAverage : StateValueDerivation::MaxOverActions;
    if (policy_average) {
        fp.v = state_values_from_q(q, *kind.policy);
    } else {
        fp.v = StateValueFn::zeros(mdp.n_states());
        for (int s = 0; s < mdp.n_states(); ++s) {
            auto row = q.row(s);
            fp.v[s] = *std::max_element(row.begin(), row.end());
        }
    }
    fp.q = std::move(q);
    return fp;
}

PreservationReport check_optimality_preservation(const TabularMdp& mdp, const OperatorKind& alt,
                                                 int max_iter) {
    PreservationReport report;
    report.operator_name = operator_name(alt);
    report.classical = iterate_q_operator(OperatorKind::optimality_q(), mdp, 1e-10, max_iter);
    report.alternative = iterate_q_operator(alt, mdp, 1e-10, max_iter);
    if (!report.classical.converged || !report.alternative.converged) {
        report.conclusive = false;
        report.verdicts.assign(static_cast<std::size_t>(mdp.n_states()) * mdp.n_actions(),
                               PairVerdict::Inconclusive);
        return report;
    }
    report.conclusive = true;
    report.verdicts.reserve(static_cast<std::size_t>(mdp.n_states()) * mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            const bool suboptimal =
                report.classical.q.at(s, a) < report.classical.v[s] - kStrictnessMargin;
            if (!suboptimal) {
                report.verdicts.push_back(PairVerdict::Preserved); // vacuous
                continue;
            }
            const bool still_suboptimal =
                report.alternative.q.at(s, a) < report.alternative.v[s] + kStrictnessMargin;
            report.verdicts.push_back(still_suboptimal ? PairVerdict::Preserved
                                                       : PairVerdict::Violated);
            if (!still_suboptimal) ++report.violations;
        }
    }
    const auto classical_actions = greedy_actions(report.classical.q);
    const auto alt_actions = greedy_actions(report.alternative.q);
    report.argmax_agreement.reserve(static_cast<std::size_t>(mdp.n_states()));
    for (int s = 0; s < mdp.n_states(); ++s)
        report.argmax_agreement.push_back(classical_actions[s] == alt_actions[s]);
    return report;
}

GapReport check_gap_increasing(const TabularMdp& mdp, const OperatorKind& alt, int max_iter) {
    GapReport report;
    report.operator_name = operator_name(alt);
    const auto classical = iterate_q_operator(OperatorKind::optimality_q(), mdp, 1e-10, max_iter);
    const auto alternative = iterate_q_operator(alt, mdp, 1e-10, max_iter);
    if (!classical.converged || !alternative.converged) {
        report.conclusive = false;
        return report;
    }
    report.conclusive = true;
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            const double gap_b = std::abs(classical.q.at(s, a) - classical.v[s]);
            const double gap_a = std::abs(alternative.q.at(s, a) - alternative.v[s]);
            report.gap_classical.push_back(gap_b);
            report.gap_alternative.push_back(gap_a);
            if (gap_b > gap_a + kStrictnessMargin) ++report.violations;
        }
    }
    return report;
}

OperatorComparisonReport fixed_point_cross_report(const TabularMdp& mdp,
                                                  const std::vector<OperatorKind>& kinds,
                                                  const std::string& mdp_id, int max_iter) {
    OperatorComparisonReport report;
    report.mdp_id = mdp_id;
    report.classical = iterate_q_operator(OperatorKind::optimality_q(), mdp, 1e-10, max_iter);
    const auto classical_actions = greedy_actions(report.classical.q);
    for (const auto& kind : kinds) {
        OperatorFixedPoint fp = iterate_q_operator(kind, mdp, 1e-10, max_iter);
        std::vector<bool> agreement;
        std::vector<double> gaps;
        if (fp.converged) {
            const auto actions = greedy_actions(fp.q);
            for (int s = 0; s < mdp.n_states(); ++s)
                agreement.push_back(actions[s] == classical_actions[s]);
            for (int s = 0; s < mdp.n_states(); ++s)
                for (int a = 0; a < mdp.n_actions(); ++a)
                    gaps.push_back(std::abs(fp.q.at(s, a) - fp.v[s]));
        }
        report.argmax_agreement.push_back(std::move(agreement));
        report.gap_tables.push_back(std::move(gaps));
        report.operators.push_back(std::move(fp));
    }
    return report;
}

std::string contraction_checks_to_csv(const std::vector<ContractionCheck>& checks) {
    std::string out = "operator,discount,estimated_modulus,samples,violation\n";
    for (const auto& c : checks) {
        out += c.operator_name;
        out += ',';
        out += format_double(c.discount);
        out += ',';
        out += format_double(c.estimated_modulus);
        out += ',';
        out += std::to_string(c.sample_count);
        out += ',';
        out += c.violation ? "1" : "0";
        out += '\n';
    }
    return out;
}

std::string monotonicity_checks_to_csv(const std::vector<MonotonicityCheck>& checks) {
    std::string out = "operator,pairs,violations\n";
    for (const auto& c : checks) {
        out += c.operator_name;
        out += ',';
        out += std::to_string(c.pairs);
        out += ',';
        out += std::to_string(c.violations);
        out += '\n';
    }
    return out;
}

std::string gap_report_to_csv(const GapReport& report, int n_actions) {
    std::string out = "state,action,gap_classical,gap_alternative\n";
    for (std::size_t i = 0; i < report.gap_classical.size(); ++i) {
        out += std::to_string(i / static_cast<std::size_t>(n_actions));
        out += ',';
        out += std::to_string(i % static_cast<std::size_t>(n_actions));
        out += ',';
        out += format_double(report.gap_classical[i]);
        out += ',';
        out += format_double(report.gap_alternative[i]);
        out += '\n';
    }
    return out;
}

std::string cross_report_to_csv(const OperatorComparisonReport& report) {
    std::string out = "state,action,q_classical";
    for (const auto& fp : report.operators) {
        out += ",q_";
        out += fp.operator_name;
    }
    out += '\n';
    const int na = report.classical.q.n_actions;
    for (int s = 0; s < report.classical.q.n_states; ++s) {
        for (int a = 0; a < na; ++a) {
            out += std::to_string(s);
            out += ',';
            out += std::to_string(a);
            out += ',';
            out += format_double(report.classical.q.at(s, a));
            for (const auto& fp : report.operators) {
                out += ',';
                out += fp.converged ? format_double(fp.q.at(s, a)) : std::string("nan");
            }
            out += '\n';
        }
    }
    return out;
}

} // namespace rlops
