#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <unordered_set>

#include "risidd/harness.hpp"

using namespace risidd;

namespace {

SystemConfig tiny_config() {
    SystemConfig cfg = desk_profile();
    cfg.ldpc_n = 64;
    cfg.frames = 6;
    cfg.ris_distance = 40.0;
    return cfg;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name)
        : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("seed derivation is deterministic, sensitive, and collision-free", "[harness]") {
    CHECK(trial_seed(1, 2, 3) == trial_seed(1, 2, 3));
    CHECK(trial_seed(1, 2, 3) != trial_seed(1, 3, 2));
    CHECK(trial_seed(1, 2, 3) != trial_seed(2, 2, 3));
    CHECK(trial_seed(7, 0, 0) != trial_seed(7, 1, 0));

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(1 << 21);
    for (std::uint64_t base : {1ULL, 99991ULL}) {
        for (std::uint64_t t = 0; t < 5000; ++t)
            for (std::uint64_t v = 0; v < 100; ++v) seen.insert(trial_seed(base, t, v));
    }
    CHECK(seen.size() == 2ULL * 5000 * 100);
}

TEST_CASE("sweep variables map onto the right config fields", "[harness]") {
    const SystemConfig base = desk_profile();

    CHECK(apply_variable(base, Variable::ris_distance, 123.0).ris_distance == 123.0);
    CHECK(apply_variable(base, Variable::power_per_user, -3.5).pt_per_user_dbm == -3.5);
    CHECK(apply_variable(base, Variable::users, 6.0).K == 6);
    CHECK(apply_variable(base, Variable::antennas, 12.0).M == 12);
    CHECK(apply_variable(base, Variable::elements, 32.0).N == 32);
    CHECK_THROWS_AS(apply_variable(base, Variable::users, 4.5), std::invalid_argument);
    CHECK_THROWS_AS(apply_variable(base, Variable::elements, -8.0), std::invalid_argument);

    SECTION("schemes pin mode and iteration depth") {
        const SystemConfig lin = cell_config(base, Scheme::linear_active, 5, Variable::users, 4.0);
        CHECK(lin.ris_mode == RisMode::active);
        CHECK(lin.tau == 0);  // linear schemes ignore the requested depth
        const SystemConfig idd = cell_config(base, Scheme::idd_passive, 2, Variable::users, 4.0);
        CHECK(idd.ris_mode == RisMode::passive);
        CHECK(idd.tau == 2);
    }

    SECTION("invalid resulting configs are rejected eagerly") {
        CHECK_THROWS_AS(cell_config(base, Scheme::idd_passive, 1, Variable::users,
                                    static_cast<double>(base.M + 1)),
                        std::invalid_argument);
    }
}

TEST_CASE("enum names round-trip through their string forms", "[harness]") {
    for (Variable v : {Variable::ris_distance, Variable::power_per_user, Variable::users,
                       Variable::antennas, Variable::elements})
        CHECK(variable_from_string(to_string(v)) == v);
    for (Scheme s : {Scheme::linear_passive, Scheme::linear_active, Scheme::idd_passive,
                     Scheme::idd_active})
        CHECK(scheme_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(variable_from_string("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(scheme_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("cells aggregate deterministically at any parallelism", "[harness]") {
    const SystemConfig cfg = tiny_config();
    const std::uint64_t cell_seed = trial_seed(cfg.seed, 0, 0);

    const CellResult s1 = run_cell(cfg, cell_seed, 1);
    const CellResult s1b = run_cell(cfg, cell_seed, 1);
    const CellResult s3 = run_cell(cfg, cell_seed, 3);
    const CellResult s8 = run_cell(cfg, cell_seed, 8);

    CHECK(s1.frames_ok + s1.frames_failed == cfg.frames);
    CHECK(s1.ber == s1b.ber);
    CHECK(s1.sum_rate_mean == s1b.sum_rate_mean);

    CHECK(s1.ber == s3.ber);
    CHECK(s1.sum_rate_mean == s3.sum_rate_mean);
    CHECK(s1.sum_rate_stderr == s3.sum_rate_stderr);
    CHECK(s1.ber == s8.ber);
    CHECK(s1.sum_rate_mean == s8.sum_rate_mean);

    // per-trial provenance is carried through
    for (int t = 0; t < cfg.frames; ++t) {
        CHECK(s1.trials[static_cast<std::size_t>(t)].seed ==
              trial_seed(cell_seed, static_cast<std::uint64_t>(t), 0));
        CHECK(s1.trials[static_cast<std::size_t>(t)].config_hash == config_hash(cfg));
    }

    // sanity on the aggregates
    CHECK(s1.ber >= 0.0);
    CHECK(s1.ber <= 0.5);
    CHECK(s1.sum_rate_stderr >= 0.0);
}

TEST_CASE("sweeps emit one reproducible row per value and depth", "[harness]") {
    SweepSpec spec;
    spec.base = tiny_config();
    spec.variable = Variable::ris_distance;
    spec.values = {50.0, 200.0};
    spec.scheme = Scheme::idd_passive;
    spec.tau_list = {1, 2};
    spec.threads = 2;

    const SweepResult a = run_sweep(spec);
    REQUIRE(a.rows.size() == 4);
    CHECK(a.trials_attempted == 4 * spec.base.frames);

    const SweepResult b = run_sweep(spec);
    REQUIRE(b.rows.size() == 4);
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i] == b.rows[i]);

    SECTION("rows are ordered by value, then depth") {
        CHECK(a.rows[0].value == 50.0);
        CHECK(a.rows[0].tau == 1);
        CHECK(a.rows[1].value == 50.0);
        CHECK(a.rows[1].tau == 2);
        CHECK(a.rows[2].value == 200.0);
        CHECK(a.rows[2].tau == 1);
    }

    SECTION("each row regenerates bit-identically in isolation") {
        for (const auto& row : a.rows) {
            const ResultRow redo1 = regenerate_row(spec.base, row, 1);
            const ResultRow redo8 = regenerate_row(spec.base, row, 8);
            CHECK(redo1 == row);
            CHECK(redo8 == row);
        }
    }

    SECTION("regeneration cross-checks the base config") {
        SystemConfig wrong = spec.base;
        wrong.pt_per_user_dbm += 1.0;
        CHECK_THROWS_AS(regenerate_row(wrong, a.rows[0], 1), std::invalid_argument);
    }

    SECTION("linear schemes collapse the depth axis") {
        SweepSpec lin = spec;
        lin.scheme = Scheme::linear_passive;
        const SweepResult r = run_sweep(lin);
        REQUIRE(r.rows.size() == 2);
        CHECK(r.rows[0].tau == 0);
        CHECK(r.rows[0].scheme == "linear_passive");
    }

    SECTION("value lists must be strictly increasing") {
        SweepSpec bad = spec;
        bad.values = {200.0, 50.0};
        CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
    }

    SECTION("a systematically failing cell aborts the whole sweep") {
        SweepSpec bad = spec;
        bad.values = {50.0};
        bad.tau_list = {1};
        // Static noise power overflows to infinity in linear units, so every
        // trial's detector blows up; more than 1% failures must abort.
        bad.base.sigma_s2_dbm = 7000.0;
        CHECK_THROWS_AS(run_sweep(bad), std::runtime_error);
    }
}

TEST_CASE("CSV output round-trips losslessly", "[harness]") {
    TempFile tmp("risidd_rows.csv");

    SECTION("header-only file for no rows") {
        emit_csv({}, tmp.path);
        const auto rows = load_csv(tmp.path);
        CHECK(rows.empty());
        std::ifstream in(tmp.path);
        std::string line;
        int lines = 0;
        while (std::getline(in, line)) ++lines;
        CHECK(lines == 1);
    }

    SECTION("rows survive emit/load exactly") {
        std::vector<ResultRow> rows(3);
        rows[0] = {"idd_passive", 2, "ris_distance", 50.0, 200, 0.012345678901234567,
                   17.123456789012345, 0.03141592653589793, 0x1234abcdULL, "00ff00ff00ff00ff"};
        rows[1] = {"linear_active", 0, "power_per_user", -2.5, 500, 0.4999999999999999,
                   1e-300, 0.0, 18446744073709551615ULL, "deadbeefdeadbeef"};
        rows[2] = {"idd_active", 1, "elements", 128.0, 1, 0.0, 22.0, 0.0, 0ULL, "0000000000000000"};
        emit_csv(rows, tmp.path);

        const auto back = load_csv(tmp.path);
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i] == rows[i]);

        std::ifstream in(tmp.path);
        std::string line;
        int lines = 0;
        while (std::getline(in, line)) ++lines;
        CHECK(lines == 4);
    }

    SECTION("bad files are rejected") {
        std::ofstream(tmp.path) << "not,a,result,file\n";
        CHECK_THROWS_AS(load_csv(tmp.path), std::runtime_error);
        CHECK_THROWS_AS(load_csv("/nonexistent/nope.csv"), std::runtime_error);
    }
}

TEST_CASE("metadata sidecars capture the full run setup", "[harness]") {
    TempFile tmp("risidd_meta.txt");
    SweepSpec spec;
    spec.base = tiny_config();
    spec.variable = Variable::elements;
    spec.values = {16.0, 32.0};
    spec.scheme = Scheme::idd_active;
    spec.tau_list = {1};
    write_metadata(spec, tmp.path);

    std::ifstream in(tmp.path);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all.find("scheme=idd_active") != std::string::npos);
    CHECK(all.find("variable=elements") != std::string::npos);
    CHECK(all.find("values=16 32") != std::string::npos);
    CHECK(all.find("K=4") != std::string::npos);
    CHECK(all.find("ldpc_n=64") != std::string::npos);
    CHECK(all.find("base_config_hash=") != std::string::npos);
}
