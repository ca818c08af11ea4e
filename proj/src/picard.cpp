#include "rlops/picard.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rlops {

double sup_distance(const GridFunction& a, const GridFunction& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("sup_distance: grid size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

bool is_finite(const GridFunction& f) {
    for (double y : f.values)
        if (!std::isfinite(y)) return false;
    return true;
}

namespace {

int anchor_index(const PicardProblem& problem, const std::vector<double>& grid) {
    const double span = problem.x_hi - problem.x_lo;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i] - problem.x0) <= 1e-9 * std::max(1.0, span)) return static_cast<int>(i);
    throw std::invalid_argument("picard: x0 does not coincide with a grid point");
}

void check_problem(const PicardProblem& problem) {
    if (problem.grid_n < 2) throw std::invalid_argument("picard: grid_n must be >= 2");
    if (!(problem.x_lo < problem.x_hi)) throw std::invalid_argument("picard: empty interval");
    if (!(problem.x_lo <= problem.x0 && problem.x0 <= problem.x_hi))
        throw std::invalid_argument("picard: x0 outside the interval");
    if (!problem.rhs) throw std::invalid_argument("picard: missing right-hand side");
}

} // namespace

std::vector<double> problem_grid(const PicardProblem& problem) {
    check_problem(problem);
    std::vector<double> grid(problem.grid_n);
    const double h = (problem.x_hi - problem.x_lo) / (problem.grid_n - 1);
    for (int i = 0; i < problem.grid_n; ++i) grid[i] = problem.x_lo + h * i;
    grid.back() = problem.x_hi;
    return grid;
}

GridFunction picard_step(const PicardProblem& problem, const GridFunction& current) {
    check_problem(problem);
    const auto& grid = current.grid;
    if (static_cast<int>(grid.size()) != problem.grid_n ||
        current.values.size() != grid.size())
        throw std::invalid_argument("picard_step: current not defined on the problem grid");

    const int n = static_cast<int>(grid.size());
    const int i0 = anchor_index(problem, grid);

    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
        f[i] = problem.rhs(grid[i], current.values[i]);
        if (!std::isfinite(f[i]))
            throw std::runtime_error("picard_step: non-finite F at x = " + std::to_string(grid[i]));
    }

    GridFunction next;
    next.grid = grid;
    next.values.assign(n, problem.y0);
    // Cumulative trapezoid away from the anchor in both directions; the
    // integral is signed for x < x0.
    double acc = 0.0;
    for (int i = i0 + 1; i < n; ++i) {
        acc += 0.5 * (grid[i] - grid[i - 1]) * (f[i - 1] + f[i]);
        next.values[i] = problem.y0 + acc;
    }
    acc = 0.0;
    for (int i = i0 - 1; i >= 0; --i) {
        acc -= 0.5 * (grid[i + 1] - grid[i]) * (f[i] + f[i + 1]);
        next.values[i] = problem.y0 + acc;
    }
    return next;
}

PicardResult solve_ivp_picard_from(const PicardProblem& problem, GridFunction start, int iterations) {
    if (iterations < 1) throw std::invalid_argument("solve_ivp_picard: iterations must be >= 1");
    PicardResult result;
    result.solution = std::move(start);
    result.residual_history.reserve(iterations);
    for (int k = 0; k < iterations; ++k) {
        GridFunction next = picard_step(problem, result.solution);
        result.residual_history.push_back(sup_distance(next, result.solution));
        result.solution = std::move(next);
    }
    return result;
}

PicardResult solve_ivp_picard(const PicardProblem& problem, int iterations) {
    GridFunction start;
    start.grid = problem_grid(problem);
    start.values.assign(start.grid.size(), problem.y0);
    return solve_ivp_picard_from(problem, std::move(start), iterations);
}

PicardProblem demo_ivp(int grid_n) {
    PicardProblem p;
    p.rhs = [](double t, double x) { return 0.5 * x - t; };
    p.x0 = 0.0;
    p.y0 = 0.0;
    p.x_lo = 0.0;
    p.x_hi = 4.0;
    p.grid_n = grid_n;
    return p;
}

double demo_ivp_solution(double t) { return 2.0 * t + 4.0 - 4.0 * std::exp(0.5 * t); }

} // namespace rlops
