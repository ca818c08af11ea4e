#include "rlops/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "rlops/csv.hpp"

namespace rlops {

namespace {

GridSpec default_grid_for(EnvName env) {
    switch (env) {
    case EnvName::MountainCar: return make_grid(env, {40, 40});
    case EnvName::CartPole: return make_grid(env, {12, 12, 12, 12});
    case EnvName::Acrobot: return make_grid(env, {10, 10, 10, 10, 10, 10});
    }
    throw ConfigError("unknown environment");
}

} // namespace

ExperimentConfig parse_experiment_config(const ConfigFile& file) {
    ExperimentConfig config;
    const std::string env_name = file.get_string("env", "name", "");
    if (env_name.empty()) throw ConfigError("missing config key [env] name");
    try {
        config.environment = env_from_name(env_name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    try {
        if (file.has("env", "grid"))
            config.grid =
                make_grid(config.environment, parse_grid_shape(file.get("env", "grid").as_string()));
        else
            config.grid = default_grid_for(config.environment);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("[env] grid: ") + e.what());
    }

    LearnerConfig& learner = config.learner;
    const std::string algorithm = file.get_string("learner", "algorithm", "q-learning");
    if (algorithm != "q-learning")
        throw ConfigError("[learner] algorithm: only 'q-learning' is supported, got '" + algorithm +
                          "'");
    learner.discount = file.get_double("learner", "discount", learner.discount);
    learner.step_size = file.get_double("learner", "step_size", learner.step_size);
    learner.epsilon = file.get_double("learner", "epsilon", learner.epsilon);
    learner.epsilon_decay = file.get_double("learner", "epsilon_decay", learner.epsilon_decay);
    learner.min_epsilon = file.get_double("learner", "min_epsilon", learner.min_epsilon);
    learner.episodes = static_cast<int>(file.get_int("learner", "episodes", learner.episodes));
    learner.max_steps_per_episode =
        static_cast<int>(file.get_int("learner", "max_steps", learner.max_steps_per_episode));
    learner.seed = static_cast<std::uint64_t>(file.get_int("learner", "seed", 0));
    if (file.has("learner", "backup")) {
        try {
            learner.backup = backup_from_name(file.get("learner", "backup").as_string());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (file.has("learner", "beta.family") && file.has("learner", "beta.constant"))
        throw ConfigError("[learner] beta.family and beta.constant are mutually exclusive");
    if (file.has("learner", "beta.family"))
        learner.beta = BetaSchedule::family(
            static_cast<int>(file.get("learner", "beta.family").as_int()));
    if (file.has("learner", "beta.constant"))
        learner.beta = BetaSchedule::constant_beta(file.get("learner", "beta.constant").as_double());
    if (file.has("learner", "advantage.pi")) {
        const std::string pi = file.get("learner", "advantage.pi").as_string();
        if (pi == "greedy")
            learner.advantage_pi = AdvantagePolicy::Greedy;
        else if (pi == "behavior")
            learner.advantage_pi = AdvantagePolicy::Behavior;
        else
            throw ConfigError("[learner] advantage.pi must be 'greedy' or 'behavior'");
    }
    try {
        validate_learner_config(learner);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (file.has("experiment", "operators")) {
        for (const auto& item : file.get("experiment", "operators").as_array()) {
            try {
                config.operators.push_back(backup_from_name(item.as_string()));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    } else {
        config.operators = {learner.backup};
    }
    if (config.operators.empty()) throw ConfigError("[experiment] operators: need at least one");

    if (file.has("experiment", "seeds")) {
        for (const auto& item : file.get("experiment", "seeds").as_array())
            config.seeds.push_back(static_cast<std::uint64_t>(item.as_int()));
    } else {
        config.seeds = {learner.seed};
    }
    if (config.seeds.empty()) throw ConfigError("[experiment] seeds: need at least one");

    config.smoothing_window =
        static_cast<int>(file.get_int("experiment", "smoothing_window", config.smoothing_window));
    if (config.smoothing_window < 1)
        throw ConfigError("[experiment] smoothing_window must be >= 1");
    config.output_dir = file.get_string("experiment", "output_dir", config.output_dir);
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return parse_experiment_config(load_config_file(path));
}

namespace {

std::string canonical_config_text(const ExperimentConfig& config) {
    std::string text;
    text += "env=" + env_to_name(config.environment) + "\n";
    text += "grid=";
    for (std::size_t i = 0; i < config.grid.bins.size(); ++i) {
        if (i) text += 'x';
        text += std::to_string(config.grid.bins[i]);
    }
    text += "\n";
    const LearnerConfig& l = config.learner;
    text += "discount=" + format_double(l.discount) + "\n";
    text += "step_size=" + format_double(l.step_size) + "\n";
    text += "epsilon=" + format_double(l.epsilon) + "\n";
    text += "epsilon_decay=" + format_double(l.epsilon_decay) + "\n";
    text += "min_epsilon=" + format_double(l.min_epsilon) + "\n";
    text += "episodes=" + std::to_string(l.episodes) + "\n";
    text += "max_steps=" + std::to_string(l.max_steps_per_episode) + "\n";
    text += l.beta.mode == BetaSchedule::Mode::Constant
                ? "beta.constant=" + format_double(l.beta.constant) + "\n"
                : "beta.family=" + std::to_string(l.beta.family_index) + "\n";
    text += std::string("advantage.pi=") +
            (l.advantage_pi == AdvantagePolicy::Greedy ? "greedy" : "behavior") + "\n";
    text += "operators=";
    for (std::size_t i = 0; i < config.operators.size(); ++i) {
        if (i) text += ',';
        text += backup_to_name(config.operators[i]);
    }
    text += "\nseeds=";
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
        if (i) text += ',';
        text += std::to_string(config.seeds[i]);
    }
    text += "\nsmoothing_window=" + std::to_string(config.smoothing_window) + "\n";
    return text;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t x) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[x & 0xf];
        x >>= 4;
    }
    return out;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BENCH_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

} // namespace

std::uint64_t config_hash(const ExperimentConfig& config) {
    return fnv1a64(canonical_config_text(config));
}

RunResult run_experiment(const ExperimentConfig& config, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult result;
    result.config_hash = config_hash(config);
    for (BackupKind op : config.operators)
        for (std::uint64_t seed : config.seeds) {
            CellResult cell;
            cell.op = op;
            cell.seed = seed;
            result.cells.push_back(std::move(cell));
        }

    const int n_workers = std::min<int>(resolve_threads(threads),
                                        static_cast<int>(result.cells.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= result.cells.size()) return;
            CellResult& cell = result.cells[i];
            try {
                ClassicControlEnv env(config.environment, config.grid);
                LearnerConfig learner = config.learner;
                learner.backup = cell.op;
                learner.seed = cell.seed;
                cell.episodes = q_learning(env, learner).episodes;
            } catch (const std::exception& e) {
                cell.failed = true;
                cell.error = e.what();
            }
        }
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& cell : result.cells)
        if (cell.failed) ++result.failed_cells;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::vector<double> smooth_rewards(const std::vector<std::vector<double>>& per_seed_rewards,
                                   int window) {
    if (per_seed_rewards.empty()) return {};
    const std::size_t episodes = per_seed_rewards.front().size();
    std::vector<double> mean(episodes, 0.0);
    for (const auto& rewards : per_seed_rewards) {
        if (rewards.size() != episodes)
            throw std::invalid_argument("smooth_rewards: ragged seed histories");
        for (std::size_t e = 0; e < episodes; ++e) mean[e] += rewards[e];
    }
    for (double& m : mean) m /= static_cast<double>(per_seed_rewards.size());
    // Trailing moving average; early episodes average what exists so far.
    std::vector<double> smoothed(episodes, 0.0);
    double acc = 0.0;
    for (std::size_t e = 0; e < episodes; ++e) {
        acc += mean[e];
        if (e >= static_cast<std::size_t>(window)) acc -= mean[e - static_cast<std::size_t>(window)];
        const auto width = std::min<std::size_t>(e + 1, static_cast<std::size_t>(window));
        smoothed[e] = acc / static_cast<double>(width);
    }
    return smoothed;
}

std::string write_experiment_csvs(const ExperimentConfig& config, const RunResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    for (const auto& cell : result.cells) {
        if (cell.failed) continue;
        std::string csv = "episode,total_reward,steps\n";
        for (const auto& log : cell.episodes) {
            csv += std::to_string(log.episode_index);
            csv += ',';
            csv += format_double(log.total_reward);
            csv += ',';
            csv += std::to_string(log.steps);
            csv += '\n';
        }
        const std::string name =
            backup_to_name(cell.op) + "_seed" + std::to_string(cell.seed) + ".csv";
        write_text_file((fs::path(config.output_dir) / name).string(), csv);
    }

    // Aggregate: seed-averaged, window-smoothed reward per episode per operator.
    std::string aggregate = "episode";
    std::vector<std::vector<double>> columns;
    for (BackupKind op : config.operators) {
        aggregate += ',';
        aggregate += backup_to_name(op);
        std::vector<std::vector<double>> per_seed;
        for (const auto& cell : result.cells) {
            if (cell.op != op || cell.failed) continue;
            std::vector<double> rewards;
            rewards.reserve(cell.episodes.size());
            for (const auto& log : cell.episodes) rewards.push_back(log.total_reward);
            per_seed.push_back(std::move(rewards));
        }
        columns.push_back(smooth_rewards(per_seed, config.smoothing_window));
    }
    aggregate += '\n';
    const std::size_t episodes = columns.empty() || columns.front().empty()
                                     ? 0
                                     : columns.front().size();
    for (std::size_t e = 0; e < episodes; ++e) {
        aggregate += std::to_string(e + 1);
        for (const auto& column : columns) {
            aggregate += ',';
            aggregate += e < column.size() ? format_double(column[e]) : std::string("nan");
        }
        aggregate += '\n';
    }
    const std::string aggregate_path = (fs::path(config.output_dir) / "aggregate.csv").string();
    write_text_file(aggregate_path, aggregate);

    std::string manifest = "config_hash " + hex64(result.config_hash) + "\n";
    for (const auto& cell : result.cells) {
        manifest += backup_to_name(cell.op) + " seed " + std::to_string(cell.seed) + " " +
                    (cell.failed ? "FAILED " + cell.error : "ok") + "\n";
    }
    write_text_file((fs::path(config.output_dir) / "run_manifest.txt").string(), manifest);
    return aggregate_path;
}

namespace {

std::string svg_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_line_chart_svg(const std::vector<double>& x,
                                  const std::vector<std::vector<double>>& series,
                                  const std::vector<std::string>& labels,
                                  const std::string& x_label, const std::string& y_label) {
    if (x.empty() || series.empty())
        throw std::invalid_argument("render_line_chart_svg: no data");
    if (series.size() != labels.size())
        throw std::invalid_argument("render_line_chart_svg: series/label count mismatch");
    for (const auto& s : series)
        if (s.size() != x.size())
            throw std::invalid_argument("render_line_chart_svg: ragged series");

    const double width = 860, height = 520;
    const double ml = 70, mr = 20, mt = 20, mb = 50;
    double x_min = x.front(), x_max = x.front();
    for (double v : x) {
        x_min = std::min(x_min, v);
        x_max = std::max(x_max, v);
    }
    double y_min = series[0][0], y_max = series[0][0];
    for (const auto& s : series)
        for (double v : s) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    auto sx = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto sy = [&](double v) { return height - mb - (v - y_min) / (y_max - y_min) * (height - mt - mb); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const int n_colors = 8;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_double(width) +
           "\" height=\"" + format_double(height) + "\" viewBox=\"0 0 " + format_double(width) +
           " " + format_double(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axes and ticks (drawn with <line>, keeping <polyline> for data only).
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(height - mb) +
           "\" x2=\"" + format_double(width - mr) + "\" y2=\"" + format_double(height - mb) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(mt) + "\" x2=\"" +
           format_double(ml) + "\" y2=\"" + format_double(height - mb) + "\" stroke=\"black\"/>\n";
    const int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double xv = x_min + (x_max - x_min) * i / n_ticks;
        const double yv = y_min + (y_max - y_min) * i / n_ticks;
        svg += "<line x1=\"" + format_double(sx(xv)) + "\" y1=\"" + format_double(height - mb) +
               "\" x2=\"" + format_double(sx(xv)) + "\" y2=\"" + format_double(height - mb + 5) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + format_double(sx(xv)) + "\" y=\"" + format_double(height - mb + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + format_double(xv) + "</text>\n";
        svg += "<line x1=\"" + format_double(ml - 5) + "\" y1=\"" + format_double(sy(yv)) +
               "\" x2=\"" + format_double(ml) + "\" y2=\"" + format_double(sy(yv)) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + format_double(ml - 8) + "\" y=\"" + format_double(sy(yv) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + format_double(yv) + "</text>\n";
    }
    svg += "<text x=\"" + format_double((ml + width - mr) / 2) + "\" y=\"" +
           format_double(height - 10) + "\" font-size=\"13\" text-anchor=\"middle\">" +
           svg_escape(x_label) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + format_double((mt + height - mb) / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           format_double((mt + height - mb) / 2) + ")\">" + svg_escape(y_label) + "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += colors[k % n_colors];
        svg += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) svg += ' ';
            svg += format_double(sx(x[i]));
            svg += ',';
            svg += format_double(sy(series[k][i]));
        }
        svg += "\"/>\n";
    }

    // Legend, top-right.
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const double ly = mt + 16 + 18 * static_cast<double>(k);
        svg += "<line x1=\"" + format_double(width - mr - 150) + "\" y1=\"" + format_double(ly) +
               "\" x2=\"" + format_double(width - mr - 120) + "\" y2=\"" + format_double(ly) +
               "\" stroke=\"" + colors[k % n_colors] + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + format_double(width - mr - 112) + "\" y=\"" + format_double(ly + 4) +
               "\" font-size=\"12\" class=\"legend\">" + svg_escape(labels[k]) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void emit_plot(const std::string& aggregate_csv_path, const std::string& output_svg_path) {
    const CsvTable table = parse_numeric_csv(read_text_file(aggregate_csv_path));
    if (table.header.size() < 2)
        throw std::runtime_error("emit_plot: need at least one series column, got " +
                                 std::to_string(table.header.size()) + " columns");
    if (table.rows.empty()) throw std::runtime_error("emit_plot: no data rows");
    std::vector<double> x;
    std::vector<std::vector<double>> series(table.header.size() - 1);
    for (const auto& row : table.rows) {
        x.push_back(row[0]);
        for (std::size_t c = 1; c < row.size(); ++c) series[c - 1].push_back(row[c]);
    }
    std::vector<std::string> labels(table.header.begin() + 1, table.header.end());
    const std::string svg = render_line_chart_svg(x, series, labels, table.header.front(),
                                                  "smoothed average reward");
    write_text_file(output_svg_path, svg);
}

} // namespace rlops
