#include <doctest.h>

#include <filesystem>

#include "deljet/pipeline.hpp"

using namespace deljet;

namespace {

// Hyperparameters shrunk so a full fit takes seconds; widths untouched.
JetConfigs fast_configs() {
    JetConfigs cfg;
    cfg.wing1.number_of_epochs = 1;
    cfg.wing2.number_of_epochs = 1;
    for (auto& l : cfg.tail.layers) l.max_epoch = 1;
    cfg.body.epochs = 1;
    cfg.nose.epochs = 2;
    cfg.probe.epochs = 2;
    return cfg;
}

TimeSeries small_series(std::size_t lattice_rows, std::uint64_t seed) {
    SynthConfig s;
    s.length = lattice_rows + 7;
    s.seed = seed;
    return synth_generate(s);
}

struct Fitted {
    MinMaxScaler scaler;
    LagDataset train_s, val_s;
    ChronoSplit split;
    JetPipeline pipe;
    FitArtifacts art;
};

Fitted fit_small(std::size_t rows, std::uint64_t seed) {
    Fitted f;
    TimeSeries ts = small_series(rows, seed);
    LagDataset lag = build_lag_matrix(ts, LagSpec{});
    f.split = chrono_split(lag, SplitFractions{});
    f.scaler = fit_scaler(f.split.train);
    f.train_s = apply_scaler(f.scaler, f.split.train);
    f.val_s = apply_scaler(f.scaler, f.split.val);
    f.pipe = fit_pipeline(f.train_s, f.val_s, fast_configs(), seed, f.scaler, &f.art);
    return f;
}

}  // namespace

TEST_CASE("pipeline width arithmetic") {
    Fitted f = fit_small(150, 1);
    CHECK(f.pipe.widths.concat == 71 + 128 + 128 + 70);
    CHECK(f.pipe.widths.concat == 397);
    CHECK(f.pipe.widths.reduced == 200);
    CHECK(f.pipe.widths.nose_in == 200 + 71);
    CHECK(f.art.concat_train.cols == 397);
    CHECK(f.art.reduced_train.cols == 200);
}

TEST_CASE("assemble_concat_features lays blocks out in order") {
    Matrix o{1, 2, {1, 2}}, w1{1, 2, {3, 4}}, w2{1, 1, {5}}, t{1, 2, {6, 7}};
    Matrix c = assemble_concat_features(o, w1, w2, t);
    CHECK(c.cols == 7);
    CHECK(c.v == std::vector<double>{1, 2, 3, 4, 5, 6, 7});

    Matrix bad{2, 2, {0, 0, 0, 0}};
    CHECK_THROWS_AS(assemble_concat_features(bad, w1, w2, t), ShapeMismatch);
}

TEST_CASE("body bottleneck must be narrower than its input") {
    BodyConfig cfg;
    cfg.bottleneck = 397;
    CHECK_THROWS_AS(cfg.validate(397), BottleneckTooWide);
    cfg.bottleneck = 396;
    CHECK_NOTHROW(cfg.validate(397));
}

TEST_CASE("fit_pipeline is deterministic per seed") {
    Fitted a = fit_small(120, 4);
    Fitted b = fit_small(120, 4);
    CHECK(a.pipe.wing1.net == b.pipe.wing1.net);
    CHECK(a.pipe.wing2.net == b.pipe.wing2.net);
    CHECK(a.pipe.body == b.pipe.body);
    CHECK(a.pipe.nose == b.pipe.nose);
    auto pa = predict(a.pipe, a.split.test);
    auto pb = predict(b.pipe, b.split.test);
    CHECK(pa == pb);
}

TEST_CASE("different seeds give different pipelines") {
    Fitted a = fit_small(120, 5);
    Fitted b = fit_small(120, 6);
    CHECK(!(a.pipe.nose == b.pipe.nose));
}

TEST_CASE("predict composes the stages exactly") {
    Fitted f = fit_small(130, 7);
    const LagDataset& raw = f.split.test;
    LagDataset scaled = apply_scaler(f.scaler, raw);

    Matrix w1 = f.pipe.wing1.features(scaled);
    Matrix w2 = f.pipe.wing2.features(scaled);
    Matrix tc = f.pipe.tail.encode(scaled.X);
    Matrix cc = assemble_concat_features(scaled.X, w1, w2, tc);
    Matrix red = body_encode(f.pipe.body, cc);
    Matrix nose_in{red.rows, red.cols + scaled.X.cols};
    for (std::size_t r = 0; r < red.rows; ++r) {
        for (std::size_t c = 0; c < red.cols; ++c) nose_in.at(r, c) = red.at(r, c);
        for (std::size_t c = 0; c < scaled.X.cols; ++c)
            nose_in.at(r, red.cols + c) = scaled.X.at(r, c);
    }
    auto scaled_pred = network_predict(f.pipe.nose, nose_in);
    auto expect = invert_target(f.scaler, scaled_pred);

    auto got = predict(f.pipe, raw);
    CHECK(got == expect);
}

TEST_CASE("pipeline save/load round-trips bit-exactly") {
    Fitted f = fit_small(110, 8);
    auto p = std::filesystem::temp_directory_path() / "deljet_pipe.bin";
    f.pipe.save(p);
    JetPipeline back = JetPipeline::load(p);
    auto pa = predict(f.pipe, f.split.test);
    auto pb = predict(back, f.split.test);
    CHECK(pa == pb);
    CHECK(back.widths.concat == 397);
    std::filesystem::remove(p);
}

TEST_CASE("run_experiment produces one stage block per component") {
    TimeSeries ts = small_series(140, 9);
    ExperimentOptions opts;
    opts.n_runs = 2;
    opts.base_seed = 3;
    ExperimentReport rep = run_experiment(ts, fast_configs(), opts);
    REQUIRE(rep.stages.size() == 5);
    CHECK(rep.stages[0].stage == "wing1");
    CHECK(rep.stages[1].stage == "wing2");
    CHECK(rep.stages[2].stage == "tail");
    CHECK(rep.stages[3].stage == "body");
    CHECK(rep.stages[4].stage == "nose");
    for (const auto& st : rep.stages) {
        CHECK(st.runs.size() == 2);
        for (const auto& r : st.runs) {
            CHECK(r.rmse >= r.sde);  // rmse^2 = bias^2 + sde^2
            CHECK(r.rmse >= 0.0);
        }
    }
    CHECK(rep.plot_actual.size() == rep.plot_predicted.size());
    CHECK(rep.plot_actual.size() == rep.plot_timestamps.size());
    CHECK(!rep.plot_actual.empty());
}

TEST_CASE("run_experiment with baseline appends a sixth stage") {
    TimeSeries ts = small_series(130, 10);
    ExperimentOptions opts;
    opts.n_runs = 1;
    opts.include_baseline = true;
    ExperimentReport rep = run_experiment(ts, fast_configs(), opts);
    REQUIRE(rep.stages.size() == 6);
    CHECK(rep.stages[5].stage == "baseline_mlp");
}

TEST_CASE("run_experiment is bit-reproducible") {
    TimeSeries ts = small_series(120, 11);
    ExperimentOptions opts;
    opts.n_runs = 2;
    opts.base_seed = 17;
    ExperimentReport a = run_experiment(ts, fast_configs(), opts);
    ExperimentReport b = run_experiment(ts, fast_configs(), opts);
    CHECK(a.to_csv() == b.to_csv());
    CHECK(a.plot_predicted == b.plot_predicted);
}

TEST_CASE("report formats include every stage and the aggregate row") {
    TimeSeries ts = small_series(120, 12);
    ExperimentOptions opts;
    opts.n_runs = 2;
    ExperimentReport rep = run_experiment(ts, fast_configs(), opts);
    std::string csv = rep.to_csv();
    std::string table = rep.to_table();
    for (const char* s : {"wing1", "wing2", "tail", "body", "nose"}) {
        CHECK(csv.find(s) != std::string::npos);
        CHECK(table.find(s) != std::string::npos);
    }
    CHECK(table.find("±") != std::string::npos);
}
