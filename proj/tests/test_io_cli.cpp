#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zenoprot/io.hpp"

using namespace zenoprot;
namespace fs = std::filesystem;

namespace {

const char* kCli = ZENOPROT_CLI_PATH;
const fs::path kSource = ZENOPROT_SOURCE_DIR;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(kCli) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("zenoprot_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("fmt_double round-trips exactly") {
    for (double v : {0.0, 1.0, -3.5, 0.1, 1e-17, 12345.678901234567, 2.0 / 3.0}) {
        CHECK(std::stod(fmt_double(v)) == v);
    }
    CHECK(fmt_double(0.5) == "0.5");
}

TEST_CASE("config parsing: defaults, units, and schema rejection") {
    SUBCASE("empty object keeps defaults") {
        const RunConfig cfg = parse_config(Json::object());
        CHECK(cfg.master_seed == 1);
        CHECK(cfg.n_pulses == 34);
        CHECK(cfg.error_amplitudes == std::vector<double>(6, 0.005));
        CHECK(cfg.fields.b_field[0] == doctest::Approx(7e-3));
        CHECK_FALSE(cfg.sweep.has_value());
    }

    SUBCASE("shipped default config parses and converts units") {
        std::ifstream in(kSource / "configs" / "default.json");
        REQUIRE(in.good());
        const RunConfig cfg = parse_config(Json::parse(in));
        CHECK(cfg.fields.b_field[2] == doctest::Approx(-6.8e-3));
        CHECK(cfg.fields.delta == doctest::Approx(-1e-5 * constants::eV_rad_per_ns));
        CHECK(cfg.correlation_time == doctest::Approx(1e6));
        CHECK(cfg.cycle.n_cycles == 20);
        REQUIRE(cfg.sweep.has_value());
        CHECK(cfg.sweep->intervals.size() == 7);
        CHECK(cfg.kinetics.params.tau_60f == doctest::Approx(0.115e6));
    }

    SUBCASE("unknown keys rejected at every level") {
        CHECK_THROWS_AS(parse_config(Json{{"mystery", 1}}), ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"fields", {{"e_field", "1 V/m"}}}}), ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"fields", {{"laser_a", {{"e_z", "1 V/m"}}}}}}),
                        ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"cycle", {{"zeno", "1 ns"}}}}), ConfigError);
    }

    SUBCASE("unit and range violations rejected") {
        CHECK_THROWS_AS(parse_config(Json{{"fields", {{"b_field", {"1 T", "2 T"}}}}}),
                        ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"fields", {{"b_field", {"1 G", "2 T", "3 T"}}}}}),
                        ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"fields", {{"omega_r", 0.98}}}}), ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"cycle", {{"eta", 1.5}}}}), ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"cycle", {{"n_cycles", 0}}}}), ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"errors", {{"correlation_time", "-1 ns"}}}}),
                        ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"optimizer", {{"min_duration", "11 ns"}}}}),
                        ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"kinetics", {{"delta1", 0.0}}}}), ConfigError);
        CHECK_THROWS_AS(parse_config(Json{{"master_seed", -3}}), ConfigError);
    }
}

TEST_CASE("timings JSON: both shapes accepted, bad input refused") {
    const PulseSequence a = timings_from_json(Json::parse("[1.0, 2.0, 3.0]"));
    CHECK(a.size() == 3);
    const PulseSequence b = timings_from_json(Json{{"timings_ns", {1.0, 2.0}}});
    CHECK(b.size() == 2);
    CHECK_THROWS_AS(timings_from_json(Json::array()), ConfigError);
    CHECK_THROWS_AS(timings_from_json(Json{{"other", 1}}), ConfigError);
    CHECK_THROWS_AS(timings_from_json(Json::parse("[1.0, \"x\"]")), ConfigError);
    CHECK_THROWS_AS(timings_from_json(Json::parse("[1.0, -2.0]")), ConfigError);

    // round trip
    const PulseSequence seq = PulseSequence::alternating({1.5, 2.5, 3.5});
    CHECK(timings_from_json(timings_to_json(seq)).timings() == seq.timings());
}

TEST_CASE("matrix JSON round trip") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    Matrix m(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m(i, j) = Complex(g(rng), g(rng));
    const Matrix back = matrix_from_json(matrix_to_json(m));
    CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv emitters include headers") {
    FidelityTrace trace;
    trace.cycles.push_back({1, 0.75, 0.5, 0.5});
    const std::string csv = trace_to_csv(trace);
    CHECK(csv.rfind("cycle,fidelity,survival_prob,cumulative_success\n", 0) == 0);
    CHECK(csv.find("1,0.75,0.5,0.5\n") != std::string::npos);

    const std::string kin = kinetics_to_csv(1.0, 1.0, KineticsState{1, 0, 0, 0}, 1.0, 3);
    CHECK(kin.rfind("t,pop_g1,", 0) == 0);
}

TEST_CASE("cli: model command emits the operator set") {
    const fs::path dir = fresh_dir("model");
    const fs::path cfg = kSource / "configs" / "default.json";
    CHECK(run_cli("model --config " + cfg.string() + " --out " + dir.string()) == 0);
    const Json out = Json::parse(slurp(dir / "model.json"));
    CHECK(out["dimension"] == 14);
    CHECK(out["ancilla_bound_satisfied"] == true);
    CHECK(out["code_indices"] == Json::array({9, 10}));
    REQUIRE(out["operators"].size() == 10);
    for (const auto& op : out["operators"]) {
        CHECK(op["hermitian"] == true);
        const Matrix m = matrix_from_json(op["matrix"]);
        CHECK(m.rows() == 14);
    }
    CHECK(fs::exists(dir / "run_meta.json"));
}

TEST_CASE("cli: verify accepts the reference timings and reports the residual") {
    const fs::path dir = fresh_dir("verify");
    const fs::path timings = kSource / "data" / "reference_timings.json";
    CHECK(run_cli("verify --timings " + timings.string() + " --out " + dir.string()) == 0);
    const Json report = Json::parse(slurp(dir / "coding_report.json"));
    CHECK(report["residual"].get<double>() > 0.0);
    CHECK(report["condition_matrix_norms"].size() == 6);
    CHECK(report["unitarity_defect"].get<double>() < 1e-10);
}

TEST_CASE("cli: exit codes for config, io, and convergence failures") {
    const fs::path dir = fresh_dir("exitcodes");

    // unknown config key -> 3
    const fs::path bad_cfg = dir / "bad.json";
    std::ofstream(bad_cfg) << R"({"unknown_section": {}})";
    CHECK(run_cli("model --config " + bad_cfg.string() + " --out " + dir.string()) == 3);

    // malformed JSON -> 3
    const fs::path broken = dir / "broken.json";
    std::ofstream(broken) << "{ not json";
    CHECK(run_cli("model --config " + broken.string() + " --out " + dir.string()) == 3);

    // missing file -> 4
    CHECK(run_cli("verify --timings " + (dir / "nope.json").string() + " --out " +
                  dir.string()) == 4);
    CHECK(run_cli("model --config " + (dir / "nope.json").string() + " --out " +
                  dir.string()) == 4);

    // unreachable tolerance with one short restart -> 2
    const fs::path strict = dir / "strict.json";
    std::ofstream(strict) << R"({"optimizer": {"tolerance": 1e-30, "max_restarts": 1,)"
                          << R"( "max_iterations": 2}})";
    CHECK(run_cli("optimize --config " + strict.string() + " --out " + dir.string()) == 2);

    // empty timing list -> 3
    const fs::path empty = dir / "empty.json";
    std::ofstream(empty) << "[]";
    CHECK(run_cli("verify --timings " + empty.string() + " --out " + dir.string()) == 3);
}

TEST_CASE("cli: optimize is reproducible byte for byte") {
    const fs::path dir_a = fresh_dir("opt_a");
    const fs::path dir_b = fresh_dir("opt_b");
    CHECK(run_cli("optimize --seed 7 --out " + dir_a.string()) == 0);
    CHECK(run_cli("optimize --seed 7 --out " + dir_b.string()) == 0);
    CHECK(slurp(dir_a / "timings.json") == slurp(dir_b / "timings.json"));

    const Json out = Json::parse(slurp(dir_a / "timings.json"));
    CHECK(out["converged"] == true);
    CHECK(out["report"]["residual"].get<double>() < 1e-6);
    CHECK(out["timings_ns"].size() == 34);

    // different seed gives a different (but still converged) solution
    const fs::path dir_c = fresh_dir("opt_c");
    CHECK(run_cli("optimize --seed 8 --out " + dir_c.string()) == 0);
    CHECK(slurp(dir_c / "timings.json") != slurp(dir_a / "timings.json"));
}

TEST_CASE("cli: project emits kinetics and the exact eta") {
    const fs::path dir = fresh_dir("project");
    CHECK(run_cli("project --out " + dir.string()) == 0);
    const Json out = Json::parse(slurp(dir / "eta.json"));
    CHECK(out["rate_ratio_exact"] == "8/9");
    CHECK(out["eta"].get<double>() ==
          doctest::Approx(12.0 * std::sqrt(2.0) / 17.0).epsilon(1e-12));
    const std::string csv = slurp(dir / "kinetics.csv");
    CHECK(csv.rfind("t,pop_g1,", 0) == 0);
    // deterministic rerun
    const fs::path dir2 = fresh_dir("project2");
    CHECK(run_cli("project --out " + dir2.string()) == 0);
    CHECK(slurp(dir2 / "kinetics.csv") == csv);
    CHECK(slurp(dir2 / "eta.json") == slurp(dir / "eta.json"));
}

TEST_CASE("cli: simulate with supplied timings writes trace and sweep") {
    const fs::path dir = fresh_dir("simulate");
    const fs::path cfg_path = dir / "cfg.json";
    std::ofstream(cfg_path) << R"({
      "cycle": {"zeno_interval": "10 ns", "n_cycles": 5},
      "sweep": {"intervals": ["1 ns", "1.8 ns", "3.2 ns", "5.6 ns", "10 ns"],
                "trajectories": 5}
    })";
    const fs::path timings = kSource / "data" / "reference_timings.json";
    CHECK(run_cli("simulate --config " + cfg_path.string() + " --timings " + timings.string() +
                  " --out " + dir.string()) == 0);
    const std::string trace = slurp(dir / "trace.csv");
    CHECK(trace.rfind("cycle,fidelity,", 0) == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 6);  // header + 5 cycles
    const Json sweep = Json::parse(slurp(dir / "sweep.json"));
    CHECK(sweep["points"].size() == 5);

    // byte-identical rerun
    const fs::path dir2 = fresh_dir("simulate2");
    CHECK(run_cli("simulate --config " + cfg_path.string() + " --timings " + timings.string() +
                  " --out " + dir2.string()) == 0);
    CHECK(slurp(dir2 / "trace.csv") == trace);
    CHECK(slurp(dir2 / "sweep.json") == slurp(dir / "sweep.json"));
}
