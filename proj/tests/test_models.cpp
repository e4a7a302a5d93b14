#include <doctest.h>

#include "deljet/models.hpp"

using namespace deljet;

namespace {

// Small scaled dataset for quick training runs.
LagDataset small_scaled(std::size_t n, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.length = n + 7;
    cfg.seed = seed;
    TimeSeries ts = synth_generate(cfg);
    LagDataset lag = build_lag_matrix(ts, LagSpec{});
    MinMaxScaler sc = fit_scaler(lag);
    return apply_scaler(sc, lag);
}

CnnConfig fast_wing(const CnnConfig& base) {
    CnnConfig cfg = base;
    cfg.number_of_epochs = 1;
    return cfg;
}

TailConfig fast_tail() {
    TailConfig cfg = TailConfig::defaults();
    for (auto& l : cfg.layers) l.max_epoch = 1;
    return cfg;
}

}  // namespace

TEST_CASE("wing defaults match the reference table") {
    CnnConfig w1 = CnnConfig::wing1_default();
    CHECK(w1.name == "wing1");
    CHECK(w1.number_of_layers == 10);
    CHECK(w1.number_of_epochs == 5);
    CHECK(w1.initial_learning_rate == 0.001);
    CHECK(w1.feature_width == 128);

    CnnConfig w2 = CnnConfig::wing2_default();
    CHECK(w2.name == "wing2");
    CHECK(w2.number_of_layers == 12);
    CHECK(w2.number_of_epochs == 50);
    CHECK(w2.initial_learning_rate == 0.001);
}

TEST_CASE("tail defaults match the reference table") {
    TailConfig t = TailConfig::defaults();
    REQUIRE(t.layers.size() == 8);
    const std::size_t neurons[] = {50, 100, 100, 175, 50, 100, 55, 70};
    const std::size_t epochs[] = {50, 80, 200, 75, 50, 250, 100, 200};
    const double l2[] = {0.00003, 0.00001, 0.00002, 0.00001,
                         0.00001, 0.00001, 0.00002, 0.00002};
    const double beta[] = {4, 3, 4, 3, 4, 5, 4, 4};
    const double rho[] = {0.15, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
    for (int i = 0; i < 8; ++i) {
        CAPTURE(i);
        CHECK(t.layers[i].neurons == neurons[i]);
        CHECK(t.layers[i].max_epoch == epochs[i]);
        CHECK(t.layers[i].l2_weight == l2[i]);
        CHECK(t.layers[i].sparsity_reg == beta[i]);
        CHECK(t.layers[i].sparsity_prop == rho[i]);
    }
}

TEST_CASE("wing networks respect the nominal layer count") {
    CHECK(CnnConfig::wing1_default().nominal_layer_count() == 10);
    CHECK(CnnConfig::wing2_default().nominal_layer_count() == 12);
    CnnConfig bad = CnnConfig::wing1_default();
    bad.number_of_layers = 11;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("wing feature layer is 128 wide, output 1 wide") {
    for (auto cfg : {CnnConfig::wing1_default(), CnnConfig::wing2_default()}) {
        Network net = cfg.build_network(8, 9, 1);
        CHECK(net.output_width() == 1);
        auto shapes = net.layer_shapes();
        CHECK(shapes[cfg.feature_layer_index()] == std::vector<std::size_t>{128});
    }
}

TEST_CASE("train_wing records per-epoch validation rmse and extracts features") {
    LagDataset data = small_scaled(120, 1);
    CnnConfig cfg = fast_wing(CnnConfig::wing1_default());
    cfg.number_of_epochs = 2;
    TrainedWing wing = train_wing(cfg, data, data, 7);
    CHECK(wing.val_rmse_per_epoch.size() == 2);
    Matrix f = wing.features(data);
    CHECK(f.rows == data.size());
    CHECK(f.cols == 128);
    auto preds = wing.predict(data);
    CHECK(preds.size() == data.size());
}

TEST_CASE("train_wing is reproducible per seed") {
    LagDataset data = small_scaled(80, 2);
    CnnConfig cfg = fast_wing(CnnConfig::wing1_default());
    TrainedWing a = train_wing(cfg, data, data, 5);
    TrainedWing b = train_wing(cfg, data, data, 5);
    TrainedWing c = train_wing(cfg, data, data, 6);
    CHECK(a.net == b.net);
    CHECK(!(a.net == c.net));
}

TEST_CASE("tail stacks eight autoencoders and the deepest code is 70 wide") {
    LagDataset data = small_scaled(100, 3);
    TrainedTail tail = train_tail(fast_tail(), data, 11);
    REQUIRE(tail.autoencoders.size() == 8);
    Matrix code = tail.encode(data.X);
    CHECK(code.rows == data.size());
    CHECK(code.cols == 70);
    auto preds = tail.predict(data.X);
    CHECK(preds.size() == data.size());
}

TEST_CASE("greedy pretraining trains layers in isolation") {
    // Each AE maps the previous code to itself: layer i input width equals
    // layer i-1 neurons, and training layer i never mutates layers 0..i-1.
    LagDataset data = small_scaled(90, 4);
    TailConfig cfg = fast_tail();
    TrainedTail t8 = train_tail(cfg, data, 21);

    const std::size_t widths[] = {50, 100, 100, 175, 50, 100, 55, 70};
    std::size_t in = data.X.cols;
    for (int i = 0; i < 8; ++i) {
        const auto& specs = t8.autoencoders[i].specs();
        auto d0 = std::get<Dense>(specs[0]);
        CHECK(d0.in == in);
        CHECK(d0.out == widths[i]);
        auto d1 = std::get<Dense>(specs[2]);
        CHECK(d1.in == widths[i]);
        CHECK(d1.out == in);
        in = widths[i];
    }
}

TEST_CASE("train_tail is reproducible per seed") {
    LagDataset data = small_scaled(70, 5);
    TailConfig cfg = fast_tail();
    TrainedTail a = train_tail(cfg, data, 9);
    TrainedTail b = train_tail(cfg, data, 9);
    for (int i = 0; i < 8; ++i) CHECK(a.autoencoders[i] == b.autoencoders[i]);
    CHECK(a.probe == b.probe);
}

TEST_CASE("probe has a single 26-unit hidden layer") {
    LagDataset data = small_scaled(60, 6);
    Network probe = fit_probe(data.X, data.y, 13);
    REQUIRE(probe.num_layers() == 3);
    auto d0 = std::get<Dense>(probe.specs()[0]);
    CHECK(d0.out == 26);
    auto d1 = std::get<Dense>(probe.specs()[2]);
    CHECK(d1.in == 26);
    CHECK(d1.out == 1);
}

TEST_CASE("tail_mean_activations reports one value per stacked layer") {
    LagDataset data = small_scaled(50, 7);
    TrainedTail tail = train_tail(fast_tail(), data, 31);
    auto means = tail_mean_activations(tail, data.X);
    REQUIRE(means.size() == 8);
    for (double m : means) {
        CHECK(m > 0.0);
        CHECK(m < 1.0);  // sigmoid codes
    }
}
