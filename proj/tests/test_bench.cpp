#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "rlops/bench.hpp"
#include "rlops/csv.hpp"

using namespace rlops;
namespace fs = std::filesystem;

namespace {

const char* kSampleConfig = R"(
# operator comparison, desk scale
[env]
name = "mountain-car"
grid = "8x8"

[learner]
algorithm = "q-learning"
discount = 0.99
step_size = 0.1
epsilon = 1.0
epsilon_decay = 0.99
min_epsilon = 0.05
episodes = 5
max_steps = 30
beta.family = 1

[experiment]
operators = ["bellman", "consistent", "advantage"]
seeds = [1, 2]
smoothing_window = 2
output_dir = "OUTDIR"
)";

ExperimentConfig sample_config(const std::string& out_dir) {
    std::string text = kSampleConfig;
    text.replace(text.find("OUTDIR"), 6, out_dir);
    return parse_experiment_config(parse_config(text));
}

std::string temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "rlops_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

} // namespace

TEST_CASE("config file parsing") {
    const ConfigFile file = parse_config(
        "top = 1\n[a]\nx = 2.5\nname = \"hello\" # comment\nflag = true\nlist = [1, 2, 3]\n"
        "dotted.key = 7\nbare = word\n");
    CHECK(file.get("", "top").as_int() == 1);
    CHECK(file.get("a", "x").as_double() == 2.5);
    CHECK(file.get("a", "name").as_string() == "hello");
    CHECK(file.get("a", "flag").as_bool());
    CHECK(file.get("a", "list").as_array().size() == 3);
    CHECK(file.get("a", "list").as_array()[2].as_int() == 3);
    CHECK(file.get("a", "dotted.key").as_int() == 7);
    CHECK(file.get("a", "bare").as_string() == "word");
    CHECK_FALSE(file.has("a", "missing"));
    CHECK_THROWS_AS(file.get("a", "missing"), ConfigError);
    CHECK_THROWS_AS(parse_config("novalue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[broken\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("x = [1, 2\n"), ConfigError);
}

TEST_CASE("experiment config parsing and validation") {
    const ExperimentConfig config = sample_config("out");
    CHECK(config.environment == EnvName::MountainCar);
    CHECK(config.grid.bins == std::vector<int>{8, 8});
    CHECK(config.learner.episodes == 5);
    CHECK(config.learner.beta.mode == BetaSchedule::Mode::PerIteration);
    CHECK(config.operators.size() == 3);
    CHECK(config.seeds == std::vector<std::uint64_t>{1, 2});
    CHECK(config.smoothing_window == 2);

    CHECK_THROWS_AS(parse_experiment_config(parse_config("[env]\nname = \"warp-drive\"\n")),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(parse_config("[learner]\nepisodes = 5\n")),
                    ConfigError); // missing env name
    CHECK_THROWS_AS(parse_experiment_config(parse_config(
                        "[env]\nname = \"mountain-car\"\n[experiment]\noperators = [\"qq\"]\n")),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(parse_config(
            "[env]\nname = \"mountain-car\"\n[learner]\nbeta.family = 1\nbeta.constant = 0.5\n")),
        ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(parse_config(
                        "[env]\nname = \"mountain-car\"\n[learner]\nstep_size = 2.0\n")),
                    ConfigError);
}

TEST_CASE("config hash binds to the configuration") {
    const ExperimentConfig a = sample_config("out");
    ExperimentConfig b = a;
    CHECK(config_hash(a) == config_hash(b));
    b.seeds.push_back(3);
    CHECK(config_hash(a) != config_hash(b));
    ExperimentConfig c = a;
    c.learner.step_size = 0.2;
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("smoothing is a trailing moving average of the seed mean") {
    const std::vector<std::vector<double>> seeds = {{1.0, 2.0, 3.0, 4.0}, {3.0, 4.0, 5.0, 6.0}};
    // Seed mean: 2, 3, 4, 5. Window 2: 2, 2.5, 3.5, 4.5.
    CHECK(smooth_rewards(seeds, 2) == std::vector<double>{2.0, 2.5, 3.5, 4.5});
    CHECK(smooth_rewards(seeds, 1) == std::vector<double>{2.0, 3.0, 4.0, 5.0});
    CHECK_THROWS_AS(smooth_rewards({{1.0}, {1.0, 2.0}}, 1), std::invalid_argument);
}

TEST_CASE("run_experiment produces one csv per cell with the configured shape") {
    const std::string dir = temp_dir("cells");
    ExperimentConfig config = sample_config(dir);
    config.operators = {BackupKind::Classical};
    config.seeds = {7};
    const RunResult result = run_experiment(config, 1);
    REQUIRE(result.cells.size() == 1);
    CHECK(result.failed_cells == 0);
    write_experiment_csvs(config, result);
    const CsvTable cell = parse_numeric_csv(read_text_file(dir + "/bellman_seed7.csv"));
    CHECK(cell.header == std::vector<std::string>{"episode", "total_reward", "steps"});
    CHECK(cell.rows.size() == 5);
    CHECK(cell.rows.front()[0] == 1.0); // episodes numbered from 1
    for (const auto& row : cell.rows) CHECK(row[2] <= 30.0);
}

TEST_CASE("aggregate csv column order follows the config and reruns are byte-identical") {
    const std::string dir1 = temp_dir("agg1");
    const std::string dir2 = temp_dir("agg2");
    ExperimentConfig config = sample_config(dir1);
    const RunResult r1 = run_experiment(config, 2);
    write_experiment_csvs(config, r1);
    config.output_dir = dir2;
    const RunResult r2 = run_experiment(config, 1); // thread count must not matter
    write_experiment_csvs(config, r2);

    const std::string agg1 = read_text_file(dir1 + "/aggregate.csv");
    const std::string agg2 = read_text_file(dir2 + "/aggregate.csv");
    CHECK(agg1 == agg2);
    CHECK(agg1.rfind("episode,bellman,consistent,advantage\n", 0) == 0);
    CHECK(read_text_file(dir1 + "/bellman_seed1.csv") ==
          read_text_file(dir2 + "/bellman_seed1.csv"));
    CHECK(read_text_file(dir1 + "/run_manifest.txt") == read_text_file(dir2 + "/run_manifest.txt"));
}

TEST_CASE("plot: single series with three points yields one polyline of three vertices") {
    const std::string dir = temp_dir("plot1");
    const std::string csv_path = dir + "/series.csv";
    write_text_file(csv_path, "episode,bellman\n1,0.5\n2,0.75\n3,0.5\n");
    const std::string svg_path = dir + "/series.svg";
    emit_plot(csv_path, svg_path);
    const std::string svg = read_text_file(svg_path);
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        pos += 9;
    }
    CHECK(polylines == 1);
    const std::size_t points_begin = svg.find("points=\"") + 8;
    const std::size_t points_end = svg.find('"', points_begin);
    const std::string points = svg.substr(points_begin, points_end - points_begin);
    CHECK(std::count(points.begin(), points.end(), ',') == 3);
}

TEST_CASE("plot: empty data rows produce an error and no file") {
    const std::string dir = temp_dir("plot2");
    const std::string csv_path = dir + "/empty.csv";
    write_text_file(csv_path, "episode,bellman\n");
    const std::string svg_path = dir + "/empty.svg";
    CHECK_THROWS(emit_plot(csv_path, svg_path));
    CHECK_FALSE(fs::exists(svg_path));
}

TEST_CASE("plot: three series get three labeled legend entries") {
    const std::string dir = temp_dir("plot3");
    const std::string csv_path = dir + "/three.csv";
    write_text_file(csv_path,
                    "episode,bellman,consistent,advantage\n1,0,1,2\n2,1,2,3\n3,2,3,4\n");
    const std::string svg_path = dir + "/three.svg";
    emit_plot(csv_path, svg_path);
    const std::string svg = read_text_file(svg_path);
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        pos += 9;
    }
    CHECK(polylines == 3);
    CHECK(svg.find(">bellman</text>") != std::string::npos);
    CHECK(svg.find(">consistent</text>") != std::string::npos);
    CHECK(svg.find(">advantage</text>") != std::string::npos);
}

TEST_CASE("malformed csv input is rejected with diagnostics") {
    CHECK_THROWS_WITH_AS(parse_numeric_csv("a,b\n1\n"), doctest::Contains("line 2"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_numeric_csv("a,b\n1,x\n"), doctest::Contains("column 2"),
                         std::runtime_error);
    CHECK_THROWS_AS(parse_numeric_csv(""), std::runtime_error);
}
