#include <doctest.h>

#include "deljet/config.hpp"

using namespace deljet;

TEST_CASE("defaults describe the reference experiment") {
    RunConfig cfg;
    CHECK(cfg.source == "synth");
    CHECK(cfg.synth.length == 52560);
    CHECK(cfg.lag_spec.num_lags == 7);
    CHECK(cfg.lag_spec.flat_width() == 71);
    CHECK(cfg.fractions.train == doctest::Approx(0.6667));
    CHECK(cfg.fractions.val == doctest::Approx(0.1667));
    CHECK(cfg.fractions.test == doctest::Approx(0.1666));
    CHECK(cfg.n_runs == 10);
    CHECK(cfg.jet.body.bottleneck == 200);
    CHECK(cfg.jet.nose.hidden == 26);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("serialize/parse round-trips bit-exactly") {
    RunConfig cfg;
    cfg.source = "csv";
    cfg.csv_path = "data/farm.csv";
    cfg.synth.noise_std = 0.123456789012345;
    cfg.base_seed = 99;
    cfg.n_runs = 3;
    cfg.baseline = true;
    cfg.jet.tail.layers[4].sparsity_reg = 7.5;
    cfg.jet.wing2.number_of_epochs = 11;

    RunConfig back = RunConfig::parse_string(cfg.serialize());
    CHECK(back == cfg);
    CHECK(back.jet.tail.layers[4].sparsity_reg == 7.5);
    CHECK(back.jet.wing2.number_of_epochs == 11);
    CHECK(back.synth.noise_std == cfg.synth.noise_std);
}

TEST_CASE("tail layer keys address the right rows") {
    std::string text =
        "[tail]\n"
        "layer3_neurons = 123\n"
        "layer8_sparsity_proportion = 0.25\n";
    RunConfig cfg = RunConfig::parse_string(text);
    CHECK(cfg.jet.tail.layers[2].neurons == 123);
    CHECK(cfg.jet.tail.layers[7].sparsity_prop == 0.25);
    // Untouched rows keep their defaults.
    CHECK(cfg.jet.tail.layers[0].neurons == 50);
}

TEST_CASE("unknown keys and sections are rejected") {
    CHECK_THROWS_AS(RunConfig::parse_string("[data]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_string("[mystery]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_string("[tail]\nlayer9_neurons = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_string("[data]\nsource\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_string("[data]\nsynth_length = abc\n"), ConfigError);
}

TEST_CASE("comments and blank lines are ignored") {
    std::string text =
        "# a comment\n"
        "\n"
        "[experiment]\n"
        "; another\n"
        "n_runs = 4\n";
    RunConfig cfg = RunConfig::parse_string(text);
    CHECK(cfg.n_runs == 4);
}

TEST_CASE("validate rejects inconsistent configs") {
    RunConfig cfg;
    cfg.source = "csv";  // no csv_path
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = RunConfig{};
    cfg.source = "tape";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = RunConfig{};
    cfg.n_runs = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("missing config file raises DataNotFound") {
    CHECK_THROWS_AS(RunConfig::parse_file("/no/such/config.ini"), DataNotFound);
}
