#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rlops/mdp.hpp"
#include "rlops/rng.hpp"

namespace rlops {

/// Thrown when an iterated map produces a non-finite table.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int iteration, std::string what)
        : std::runtime_error(std::move(what)), iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

template <class Table>
struct FixedPointResult {
    Table fixed_point;
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> residual_history; // residual after the n-th application
    bool converged = false;
};

template <class Table>
struct ContractionReport {
    double estimated_modulus = 0.0; // max observed ratio; lower bound on the true constant
    int sample_count = 0;
    std::pair<Table, Table> worst_pair;
};

inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr int kDefaultMaxIterations = 100000;

/// Picard iteration x_{n+1} = map(x_n) under the sup norm, stopping on the
/// successive-iterate residual ||x_{n+1} - x_n||_inf < tolerance. For a
/// gamma-contraction this residual also bounds the remaining distance to
/// the fixed point by gamma/(1-gamma) * residual.
template <class Table, class Map>
FixedPointResult<Table> iterate_to_fixed_point(Map&& map, Table x0, double tolerance,
                                               int max_iter = kDefaultMaxIterations) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("iterate_to_fixed_point: tolerance must be > 0");
    if (max_iter < 1) throw std::invalid_argument("iterate_to_fixed_point: max_iter must be >= 1");
    FixedPointResult<Table> result;
    result.residual_history.reserve(64);
    Table x = std::move(x0);
    for (int n = 1; n <= max_iter; ++n) {
        Table next = map(x);
        if (!is_finite(next))
            throw DivergenceError(n, "iterate_to_fixed_point: non-finite value at iteration " +
                                         std::to_string(n));
        const double residual = sup_distance(next, x);
        result.residual_history.push_back(residual);
        x = std::move(next);
        if (residual < tolerance) {
            result.fixed_point = std::move(x);
            result.iterations = n;
            result.final_residual = residual;
            result.converged = true;
            return result;
        }
    }
    result.fixed_point = std::move(x);
    result.iterations = max_iter;
    result.final_residual = result.residual_history.back();
    result.converged = false;
    return result;
}

/// d(f^n(x), x*) <= modulus^n / (1 - modulus) * d(x, f(x)).
inline double apriori_error_bound(double modulus, int n, double first_step) {
    if (!(modulus >= 0.0 && modulus < 1.0))
        throw std::invalid_argument("apriori_error_bound: modulus must lie in [0, 1)");
    if (n < 0) throw std::invalid_argument("apriori_error_bound: n must be >= 0");
    if (first_step < 0.0) throw std::invalid_argument("apriori_error_bound: first_step must be >= 0");
    double pow_n = 1.0;
    for (int i = 0; i < n; ++i) pow_n *= modulus;
    return pow_n / (1.0 - modulus) * first_step;
}

/// Empirical Lipschitz probe: max over random pairs of
/// ||map(u) - map(v)|| / ||u - v||. The sampler draws one random table per
/// call; pairs with u == v are skipped.
template <class Map, class Sampler>
auto estimate_contraction_modulus(Map&& map, Sampler&& sampler, int trials, std::uint64_t seed)
    -> ContractionReport<decltype(sampler(std::declval<SplitMix64&>()))> {
    using Table = decltype(sampler(std::declval<SplitMix64&>()));
    if (trials < 1) throw std::invalid_argument("estimate_contraction_modulus: trials must be >= 1");
    SplitMix64 rng(seed);
    ContractionReport<Table> report;
    for (int t = 0; t < trials; ++t) {
        Table u = sampler(rng);
        Table v = sampler(rng);
        const double d = sup_distance(u, v);
        if (d == 0.0) continue;
        const double ratio = sup_distance(map(u), map(v)) / d;
        ++report.sample_count;
        if (ratio > report.estimated_modulus) {
            report.estimated_modulus = ratio;
            report.worst_pair = {std::move(u), std::move(v)};
        }
    }
    return report;
}

/// Samplers for the probe above; entries uniform in [lo, hi] (default
/// [-10, 10], wide enough to flip argmax branches in optimality operators).
inline auto uniform_state_values(int n_states, double lo = -10.0, double hi = 10.0) {
    return [n_states, lo, hi](SplitMix64& rng) {
        StateValueFn v = StateValueFn::zeros(n_states);
        for (int s = 0; s < n_states; ++s) v[s] = rng.uniform(lo, hi);
        return v;
    };
}

inline auto uniform_action_values(int n_states, int n_actions, double lo = -10.0, double hi = 10.0) {
    return [n_states, n_actions, lo, hi](SplitMix64& rng) {
        ActionValueFn q = ActionValueFn::zeros(n_states, n_actions);
        for (double& x : q.values) x = rng.uniform(lo, hi);
        return q;
    };
}

/// Residual history as CSV text, columns `iteration,residual`.
std::string residuals_to_csv(const std::vector<double>& residual_history);

} // namespace rlops
