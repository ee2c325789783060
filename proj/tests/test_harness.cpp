#include "bhlab/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bhlab;

TEST_CASE("config parsing: defaults, overrides, comments") {
    const ExperimentConfig cfg = parse_config(
        "# canonical run\n"
        "experiment = skew-symmetry\n"
        "n = 512\n"
        "seed = 7\n");
    CHECK(cfg.experiment == "skew-symmetry");
    CHECK(cfg.get_int("n") == 512);
    CHECK(cfg.get_int("count") == 50);  // default filled in
    CHECK(cfg.seed == 7);
}

TEST_CASE("config parsing: diagnostics name the offending key") {
    CHECK_THROWS_WITH_AS(parse_config("experiment = skew-symmetry\nbogus = 1\n"),
                         doctest::Contains("bogus"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("experiment = breaking-quadratic\ntheta = 0.3\n"),
                         doctest::Contains("theta"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("experiment = l1kernel-suite\nnu = 0\n"),
                         doctest::Contains("nu"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("experiment = nonsense\n"),
                         doctest::Contains("nonsense"), std::invalid_argument);
    CHECK_THROWS(parse_config("n = 512\n"));  // missing experiment
}

TEST_CASE("empty config for breaking-quadratic resolves to the canonical datum") {
    const ExperimentConfig cfg = parse_config("experiment = breaking-quadratic\n");
    CHECK(cfg.get("a") == 0.5);
    CHECK(cfg.get("theta") == 0.25);
    CHECK(cfg.get("amp_factor") == 2.0);
}

TEST_CASE("experiment registry lists all suites with schemas") {
    const auto names = list_experiments();
    CHECK(names.size() == 14);
    for (const auto& n : names) {
        const std::string text = experiment_defaults_text(n);
        CHECK(text.find("experiment = " + n) != std::string::npos);
    }
    CHECK_THROWS(experiment_defaults_text("nope"));
}

TEST_CASE("skew-symmetry experiment passes and writes a deterministic summary") {
    ExperimentConfig cfg = parse_config(
        "experiment = skew-symmetry\nn = 256\ncount = 8\n");
    cfg.output_dir = "test_harness_tmp";
    CHECK(run_experiment(cfg) == 0);
    std::ifstream is(cfg.output_dir + "/summary.txt");
    REQUIRE(is.good());
    std::stringstream first;
    first << is.rdbuf();
    CHECK(first.str().find("status = pass") != std::string::npos);
    CHECK(first.str().find("spectral_worst") != std::string::npos);

    // Rerun: byte-identical summary.
    CHECK(run_experiment(cfg) == 0);
    std::ifstream is2(cfg.output_dir + "/summary.txt");
    std::stringstream second;
    second << is2.rdbuf();
    CHECK(first.str() == second.str());
    std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("under-resolved breaking run exits with the execution-error code") {
    ExperimentConfig cfg = parse_config(
        "experiment = breaking-quadratic\nn = 256\n");
    cfg.output_dir = "test_harness_tmp2";
    CHECK(run_experiment(cfg) == 2);
    std::ifstream err(cfg.output_dir + "/error.txt");
    REQUIRE(err.good());
    std::string msg((std::istreambuf_iterator<char>(err)), std::istreambuf_iterator<char>());
    CHECK(msg.find("spectral tail") != std::string::npos);
    std::filesystem::remove_all(cfg.output_dir);
}
