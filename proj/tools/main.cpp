// rlops command line: model-based solvers, the Picard ODE demo, operator
// property analysis, and the operator-comparison benchmark harness.
//
// Exit codes: 0 success, 1 runtime/cell failure, 2 configuration error.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlops/analysis.hpp"
#include "rlops/bench.hpp"
#include "rlops/csv.hpp"
#include "rlops/dp.hpp"
#include "rlops/fixed_point.hpp"
#include "rlops/mdp.hpp"
#include "rlops/picard.hpp"

namespace {

using namespace rlops;

int cmd_solve(const std::string& algorithm, const std::string& mdp_path, double tol,
              const std::string& out_path, const std::string& residuals_path) {
    const TabularMdp mdp = load_mdp_file(mdp_path);
    if (auto violations = validate_mdp(mdp); !violations.empty()) {
        for (const auto& v : violations)
            std::cerr << "invalid mdp (s=" << v.state << ", a=" << v.action << "): " << v.constraint
                      << "\n";
        return 2;
    }
    StateValueFn values;
    Policy policy;
    if (algorithm == "policy-iteration") {
        auto result = policy_iteration(mdp, tol);
        values = std::move(result.state_values);
        policy = std::move(result.policy);
        std::cerr << "policy iteration: " << result.sweeps << " sweeps\n";
        if (!residuals_path.empty() && !result.evaluation_residuals.empty())
            write_text_file(residuals_path, residuals_to_csv(result.evaluation_residuals.back()));
    } else {
        auto result = value_iteration(mdp, tol);
        values = std::move(result.values);
        policy = std::move(result.policy);
        std::cerr << "value iteration: " << result.iterations << " iterations\n";
        if (!residuals_path.empty())
            write_text_file(residuals_path, residuals_to_csv(result.residual_history));
    }
    std::string csv = "state,value,action\n";
    for (int s = 0; s < mdp.n_states(); ++s) {
        csv += std::to_string(s) + ',' + format_double(values[s]) + ',' +
               std::to_string(policy.action(s)) + '\n';
    }
    if (out_path.empty())
        std::cout << csv;
    else
        write_text_file(out_path, csv);
    return 0;
}

int cmd_picard(int grid_n, int iterations, const std::string& csv_path,
               const std::string& svg_path) {
    const PicardProblem problem = demo_ivp(grid_n);
    // Keep a few intermediate iterates for the overlay plot.
    std::vector<GridFunction> iterates;
    std::vector<std::string> labels;
    GridFunction current;
    current.grid = problem_grid(problem);
    current.values.assign(current.grid.size(), problem.y0);
    for (int k = 1; k <= iterations; ++k) {
        current = picard_step(problem, current);
        if (k == 1 || k == 2 || k == 3 || k == 5 || k == iterations) {
            iterates.push_back(current);
            labels.push_back("iteration " + std::to_string(k));
        }
    }
    const auto& grid = current.grid;
    if (!csv_path.empty()) {
        std::string csv = "x,y_numeric,y_reference,abs_error\n";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double reference = demo_ivp_solution(grid[i]);
            csv += format_double(grid[i]) + ',' + format_double(current.values[i]) + ',' +
                   format_double(reference) + ',' +
                   format_double(std::abs(current.values[i] - reference)) + '\n';
        }
        write_text_file(csv_path, csv);
    }
    if (!svg_path.empty()) {
        std::vector<std::vector<double>> series;
        for (const auto& it : iterates) series.push_back(it.values);
        std::vector<double> reference(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) reference[i] = demo_ivp_solution(grid[i]);
        series.push_back(std::move(reference));
        labels.push_back("analytic");
        write_text_file(svg_path, render_line_chart_svg(grid, series, labels, "t", "x(t)"));
    }
    double sup_err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        sup_err = std::max(sup_err, std::abs(current.values[i] - demo_ivp_solution(grid[i])));
    std::cout << "picard: " << iterations << " iterations, grid " << grid_n
              << ", sup error vs analytic " << format_double(sup_err) << "\n";
    return 0;
}

int cmd_analyze(const std::string& mdp_path, int trials, std::uint64_t seed,
                const std::string& out_dir) {
    const TabularMdp mdp = load_mdp_file(mdp_path);
    if (auto violations = validate_mdp(mdp); !violations.empty()) {
        for (const auto& v : violations)
            std::cerr << "invalid mdp (s=" << v.state << ", a=" << v.action << "): " << v.constraint
                      << "\n";
        return 2;
    }
    const Policy uniform = Policy::uniform(mdp.n_states(), mdp.n_actions());
    const std::vector<OperatorKind> contractive = {
        OperatorKind::expectation_v(uniform), OperatorKind::expectation_q(uniform),
        OperatorKind::optimality_v(),         OperatorKind::optimality_q(),
        OperatorKind::consistent_q(),
    };

    std::vector<ContractionCheck> contraction;
    std::vector<MonotonicityCheck> monotonicity;
    for (std::size_t i = 0; i < contractive.size(); ++i) {
        contraction.push_back(check_contraction(contractive[i], mdp, trials, seed + i));
        monotonicity.push_back(check_monotonicity(contractive[i], mdp, trials, seed + 100 + i));
    }
    // The advantage operator is reported too; a modulus above gamma here is
    // its expected non-contraction behavior, not an error.
    contraction.push_back(check_contraction(
        OperatorKind::advantage_q(uniform, BetaSchedule::constant_beta(1.0)), mdp, trials,
        seed + 50));

    const OperatorKind consistent = OperatorKind::consistent_q();
    const OperatorKind advantage = OperatorKind::advantage_q_greedy(BetaSchedule::family(1));
    const GapReport gap_consistent = check_gap_increasing(mdp, consistent);
    const GapReport gap_advantage = check_gap_increasing(mdp, advantage);
    const PreservationReport pres_consistent = check_optimality_preservation(mdp, consistent);
    const PreservationReport pres_advantage = check_optimality_preservation(mdp, advantage);
    const OperatorComparisonReport cross =
        fixed_point_cross_report(mdp, {consistent, advantage}, mdp_path);

    std::cout << "== contraction (theorem for all but 'advantage') ==\n";
    for (const auto& c : contraction)
        std::cout << "  " << c.operator_name << ": modulus " << format_double(c.estimated_modulus)
                  << " vs gamma " << format_double(c.discount)
                  << (c.violation ? "  [exceeds gamma]" : "") << "\n";
    std::cout << "== monotonicity (theorem) ==\n";
    for (const auto& m : monotonicity)
        std::cout << "  " << m.operator_name << ": " << m.violations << " violations over "
                  << m.pairs << " ordered pairs\n";
    auto preservation_line = [](const PreservationReport& r) {
        std::string line = "  " + r.operator_name + ": ";
        if (!r.conclusive) return line + "inconclusive (no convergence)";
        line += std::to_string(r.violations) + " violations; argmax agreement per state:";
        for (bool b : r.argmax_agreement) line += b ? " 1" : " 0";
        return line;
    };
    std::cout << "== optimality preservation (theorem for consistent; paper claim for advantage) ==\n";
    std::cout << preservation_line(pres_consistent) << "\n";
    std::cout << preservation_line(pres_advantage) << "\n";
    std::cout << "== gap increase (paper claim under test) ==\n";
    auto gap_line = [](const GapReport& r) {
        std::string line = "  " + r.operator_name + ": ";
        if (!r.conclusive) return line + "inconclusive (no convergence)";
        return line + std::to_string(r.violations) + " shrunken gaps";
    };
    std::cout << gap_line(gap_consistent) << "\n";
    std::cout << gap_line(gap_advantage) << "\n";

    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / "contraction.csv").string(),
                        contraction_checks_to_csv(contraction));
        write_text_file((fs::path(out_dir) / "monotonicity.csv").string(),
                        monotonicity_checks_to_csv(monotonicity));
        write_text_file((fs::path(out_dir) / "gaps_consistent.csv").string(),
                        gap_report_to_csv(gap_consistent, mdp.n_actions()));
        write_text_file((fs::path(out_dir) / "gaps_advantage.csv").string(),
                        gap_report_to_csv(gap_advantage, mdp.n_actions()));
        write_text_file((fs::path(out_dir) / "fixed_points.csv").string(),
                        cross_report_to_csv(cross));
        std::cout << "reports written to " << out_dir << "\n";
    }
    return 0;
}

int cmd_bench_run(const std::string& config_path, const std::string& grid_override) {
    ExperimentConfig config;
    try {
        config = load_experiment_config(config_path);
        if (!grid_override.empty())
            config.grid = make_grid(config.environment, parse_grid_shape(grid_override));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    const RunResult result = run_experiment(config);
    const std::string aggregate = write_experiment_csvs(config, result);
    for (const auto& cell : result.cells) {
        std::cout << backup_to_name(cell.op) << " seed " << cell.seed << ": "
                  << (cell.failed ? "FAILED " + cell.error : "ok") << "\n";
    }
    std::cout << "aggregate: " << aggregate << " (wall " << format_double(result.wall_seconds)
              << " s)\n";
    return result.failed_cells > 0 ? 1 : 0;
}

int cmd_bench_plot(const std::string& in_csv, const std::string& out_svg) {
    emit_plot(in_csv, out_svg);
    std::cout << "plot written to " << out_svg << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabular RL solvers with swappable Bellman-style operators"};
    app.require_subcommand(1);

    std::string algorithm = "value-iteration", mdp_path, out_path, residuals_path;
    double tol = 1e-8;
    auto* solve = app.add_subcommand("solve", "Solve an MDP file by policy or value iteration");
    solve->add_option("--algorithm", algorithm)
        ->check(CLI::IsMember({"policy-iteration", "value-iteration"}));
    solve->add_option("--mdp", mdp_path)->required();
    solve->add_option("--tol", tol);
    solve->add_option("--out", out_path);
    solve->add_option("--residuals", residuals_path, "Write the iteration residual history CSV");

    int grid_n = 4001, picard_iterations = 30;
    std::string picard_csv, picard_svg;
    auto* picard = app.add_subcommand("picard", "Solve x' = x/2 - t by Picard iteration");
    picard->add_option("--grid-n", grid_n);
    picard->add_option("--iterations", picard_iterations);
    picard->add_option("--csv", picard_csv);
    picard->add_option("--svg", picard_svg);

    std::string analyze_mdp, analyze_out;
    int trials = 1000;
    std::uint64_t analyze_seed = 1;
    auto* analyze = app.add_subcommand("analyze", "Check operator properties on an MDP file");
    analyze->add_option("--mdp", analyze_mdp)->required();
    analyze->add_option("--trials", trials);
    analyze->add_option("--seed", analyze_seed);
    analyze->add_option("--out-dir", analyze_out);

    auto* bench = app.add_subcommand("bench", "Operator-comparison experiments");
    bench->require_subcommand(1);
    std::string bench_config, bench_grid;
    auto* bench_run = bench->add_subcommand("run", "Run an experiment config");
    bench_run->add_option("--config", bench_config)->required();
    bench_run->add_option("--grid", bench_grid, "Override the grid, e.g. 40x40");
    std::string plot_in, plot_out;
    auto* bench_plot = bench->add_subcommand("plot", "Render an aggregate CSV as SVG");
    bench_plot->add_option("--in", plot_in)->required();
    bench_plot->add_option("--out", plot_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(algorithm, mdp_path, tol, out_path, residuals_path);
        if (picard->parsed()) return cmd_picard(grid_n, picard_iterations, picard_csv, picard_svg);
        if (analyze->parsed()) return cmd_analyze(analyze_mdp, trials, analyze_seed, analyze_out);
        if (bench_run->parsed()) return cmd_bench_run(bench_config, bench_grid);
        if (bench_plot->parsed()) return cmd_bench_plot(plot_in, plot_out);
    } catch (const rlops::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
