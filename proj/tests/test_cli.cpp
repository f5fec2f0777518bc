#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "syksd/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace syksd;
namespace fs = std::filesystem;

// SYK_SD_BIN is injected by the build as the path to the syk-sd executable.

static fs::path tmpdir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "syksd-cli-test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

static int run(const std::string& args) {
    const std::string cmd = std::string(SYK_SD_BIN) + " " + args + " >" +
                            (tmpdir() / "stdout.txt").string() + " 2>" +
                            (tmpdir() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

static std::string slurp(const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

TEST_CASE("free: writes the closed-form table and is reproducible") {
    const fs::path out = tmpdir() / "free";
    const std::string args =
        "free --v 1 --gamma 4 --T 20 --n-points 128 --output-dir " + out.string();
    CHECK(run(args) == 0);
    CHECK(fs::exists(out / "free_green.csv"));
    CHECK(fs::exists(out / "config.json"));
    const std::string first = slurp(out / "free_green.csv");
    CHECK(run(args) == 0);
    CHECK(slurp(out / "free_green.csv") == first);
    CHECK(first.rfind("t,re_Gpp", 0) == 0);

    // the saved config reflects the command-line overrides
    RunConfig cfg = load_config(out / "config.json");
    CHECK(cfg.params.gamma == 4.0);
    CHECK(cfg.T == 20.0);
    CHECK(cfg.n_points == 128);
}

TEST_CASE("free: rejects parameters outside the closed form's domain") {
    CHECK(run("free --v -1 --output-dir " + (tmpdir() / "bad").string()) == 1);
    const std::string err = slurp(tmpdir() / "stderr.txt");
    CHECK(err.find("v > 0") != std::string::npos);
}

TEST_CASE("config validation failures exit with status 1") {
    CHECK(run("solve --q 3 --output-dir " + (tmpdir() / "q3").string()) == 1);
    CHECK(slurp(tmpdir() / "stderr.txt").find("q") != std::string::npos);
    CHECK(run("solve --mixing 0 --output-dir " + (tmpdir() / "m0").string()) == 1);
    CHECK(run("--not-a-flag solve") != 0);
    CHECK(run("") != 0);  // a verb is required
    CHECK(run("solve --config " + (tmpdir() / "missing.json").string()) == 1);
}

TEST_CASE("fit: empty run directory yields exit 2") {
    const fs::path empty = tmpdir() / "empty";
    fs::create_directories(empty);
    CHECK(run("fit --output-dir " + empty.string()) == 2);
}

TEST_CASE("solve: writes stationary solutions and a usable config") {
    const fs::path out = tmpdir() / "solve";
    CHECK(run("solve --v 1 --gamma 4 --J 5 --T 25 --n-points 256 --seeds-per-point 2 "
              "--continuation NONE --base-seed 7 --workers 1 --output-dir " +
              out.string()) == 0);
    REQUIRE(fs::exists(out / "solution-0.json"));
    SolutionRecord rec = read_solution(out / "solution-0.json");
    CHECK(rec.converged);
    REQUIRE(rec.stationarity.has_value());
    CHECK(*rec.stationarity < 1e-3);
    REQUIRE(rec.label.has_value());

    RunConfig cfg = load_config(out / "config.json");
    CHECK(cfg.n_points == 256);
    CHECK(cfg.sweep.seeds_per_point == 2);
    CHECK(cfg.sweep.continuation == SweepSpec::Continuation::NONE);
    CHECK(cfg.base_seed == 7);

    // fit over the run directory succeeds and keeps the config untouched
    const std::string cfg_before = slurp(out / "config.json");
    CHECK(run("fit --output-dir " + out.string()) == 0);
    CHECK(slurp(out / "config.json") == cfg_before);
}

TEST_CASE("scan: emits the branch table") {
    const fs::path out = tmpdir() / "scan";
    CHECK(run("scan --gamma 4 --J 5 --T 25 --n-points 256 --v-values -0.5,0,0.5 "
              "--seeds-per-point 1 --refine-step 0.5 --workers 1 --output-dir " +
              out.string()) == 0);
    REQUIRE(fs::exists(out / "branches.csv"));
    const std::string txt = slurp(out / "branches.csv");
    CHECK(txt.rfind("branch_id,label,v,", 0) == 0);
    CHECK(std::count(txt.begin(), txt.end(), '\n') >= 2);
}
