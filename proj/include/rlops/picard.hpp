#pragma once

#include <functional>
#include <vector>

namespace rlops {

/// A function sampled on a fixed, strictly increasing grid.
struct GridFunction {
    std::vector<double> grid;
    std::vector<double> values;

    int size() const { return static_cast<int>(grid.size()); }
};

double sup_distance(const GridFunction& a, const GridFunction& b);
bool is_finite(const GridFunction& f);

/// First-order scalar IVP y' = F(x, y), y(x0) = y0, solved on a uniform
/// grid over [x_lo, x_hi]. x0 must coincide with a grid point.
struct PicardProblem {
    std::function<double(double, double)> rhs;
    double x0 = 0.0;
    double y0 = 0.0;
    double x_lo = 0.0;
    double x_hi = 1.0;
    int grid_n = 2;
};

/// The grid the problem is discretized on (uniform, grid_n points).
std::vector<double> problem_grid(const PicardProblem& problem);

/// One application of the integral operator
///   (T g)(x) = y0 + integral_{x0}^{x} F(t, g(t)) dt,
/// with the integral taken by composite trapezoid over the grid (signed for
/// x < x0). Throws on a non-finite F evaluation, naming the grid point.
GridFunction picard_step(const PicardProblem& problem, const GridFunction& current);

struct PicardResult {
    GridFunction solution;
    std::vector<double> residual_history; // sup-norm successive differences
};

/// Iterates picard_step from the constant function y0.
PicardResult solve_ivp_picard(const PicardProblem& problem, int iterations);
/// Same, from an arbitrary start defined on the problem grid.
PicardResult solve_ivp_picard_from(const PicardProblem& problem, GridFunction start, int iterations);

/// The demo IVP x'(t) = x/2 - t, x(0) = 0 on [0, 4], whose closed form is
/// x(t) = 2t + 4 - 4 e^{t/2}.
PicardProblem demo_ivp(int grid_n = 4001);
double demo_ivp_solution(double t);

} // namespace rlops
