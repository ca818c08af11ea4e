#pragma once

#include <string>
#include <vector>

#include "rlops/fixed_point.hpp"
#include "rlops/mdp.hpp"
#include "rlops/operators.hpp"

namespace rlops {

// Empirical verification of the operator claims on concrete MDPs. The
// contraction and monotonicity checks cover theorems (any violation is a
// bug); the preservation and gap checks on the advantage operator probe a
// claim whose proof is not fully quantified, so their results are reported
// with pass rates rather than asserted blindly.

/// Margin that turns strict inequalities into testable predicates.
inline constexpr double kStrictnessMargin = 1e-9;

struct ContractionCheck {
    std::string operator_name;
    double discount = 0.0;
    double estimated_modulus = 0.0;
    int sample_count = 0;
    bool violation = false; // modulus > discount + margin
};

/// Wraps the contraction probe around the operator closed over the MDP.
/// AdvantageQ with a per-iteration schedule is probed at iteration 1.
ContractionCheck check_contraction(const OperatorKind& kind, const TabularMdp& mdp, int trials,
                                   std::uint64_t seed);

struct MonotonicityCheck {
    std::string operator_name;
    int pairs = 0;
    int violations = 0;
};

/// Draws ordered pairs u <= v (v = u plus nonnegative noise) and counts
/// pointwise order violations of the operator images.
MonotonicityCheck check_monotonicity(const OperatorKind& kind, const TabularMdp& mdp, int trials,
                                     std::uint64_t seed);

/// How the state values accompanying a Q fixed point were derived.
enum class StateValueDerivation { MaxOverActions, PolicyAverage };

/// Converged table of one Q-space operator kind, driven to a fixed point
/// (per-iteration beta resolved by sweep index, greedy-mode policies
/// refreshed every sweep).
struct OperatorFixedPoint {
    std::string operator_name;
    ActionValueFn q;
    StateValueFn v;
    StateValueDerivation derivation = StateValueDerivation::MaxOverActions;
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
};

OperatorFixedPoint iterate_q_operator(const OperatorKind& kind, const TabularMdp& mdp,
                                      double tolerance = 1e-10, int max_iter = 200000);

enum class PairVerdict { Preserved, Violated, Inconclusive };

struct PreservationReport {
    std::string operator_name;
    bool conclusive = false; // false when the alternative failed to converge
    std::vector<PairVerdict> verdicts; // per (s, a), row-major
    std::vector<bool> argmax_agreement; // per state, vs the classical operator
    int violations = 0;
    OperatorFixedPoint classical;
    OperatorFixedPoint alternative;
};

/// Classically suboptimal pairs (Q*(s,a) < V*(s) - margin) must stay
/// suboptimal under the alternative operator's fixed point.
PreservationReport check_optimality_preservation(const TabularMdp& mdp, const OperatorKind& alt,
                                                 int max_iter = 200000);

struct GapReport {
    std::string operator_name;
    bool conclusive = false;
    std::vector<double> gap_classical; // |Q*(s,a) - V*(s)|, row-major
    std::vector<double> gap_alternative;
    int violations = 0; // pairs where the alternative gap shrank beyond margin
};

/// |Q*(s,a) - V*(s)| <= |Q~(s,a) - V~(s)| + margin for every pair.
GapReport check_gap_increasing(const TabularMdp& mdp, const OperatorKind& alt,
                               int max_iter = 200000);

struct OperatorComparisonReport {
    std::string mdp_id;
    OperatorFixedPoint classical; // the classical optimality fixed point Q*, V*
    std::vector<OperatorFixedPoint> operators;
    /// argmax agreement with the classical policy, per operator per state
    std::vector<std::vector<bool>> argmax_agreement;
    std::vector<std::vector<double>> gap_tables; // |Q - V| per operator, row-major
};

/// Side-by-side fixed points; records argmax agreement, asserts nothing.
OperatorComparisonReport fixed_point_cross_report(const TabularMdp& mdp,
                                                  const std::vector<OperatorKind>& kinds,
                                                  const std::string& mdp_id = "",
                                                  int max_iter = 200000);

std::string contraction_checks_to_csv(const std::vector<ContractionCheck>& checks);
std::string monotonicity_checks_to_csv(const std::vector<MonotonicityCheck>& checks);
std::string gap_report_to_csv(const GapReport& report, int n_actions);
std::string cross_report_to_csv(const OperatorComparisonReport& report);

} // namespace rlops
