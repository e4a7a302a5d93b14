#include "deljet/models.hpp"

#include <cmath>

#include "deljet/kernels.hpp"
#include "deljet/metrics.hpp"

namespace deljet {

namespace {
constexpr std::size_t kInferBatch = 512;
}

CnnConfig CnnConfig::wing1_default() {
    CnnConfig c;
    c.name = "wing1";
    c.number_of_layers = 10;
    c.number_of_epochs = 5;
    return c;
}

CnnConfig CnnConfig::wing2_default() {
    CnnConfig c;
    c.name = "wing2";
    c.number_of_layers = 12;
    c.number_of_epochs = 50;
    return c;
}

void CnnConfig::validate() const {
    if (number_of_layers != 10 && number_of_layers != 12)
        throw ConfigError("wing layer count must be 10 or 12");
    if (number_of_epochs < 1) throw ConfigError("wing epochs must be >= 1");
    if (initial_learning_rate <= 0) throw ConfigError("wing learning rate must be > 0");
    if (feature_width < 1) throw ConfigError("wing feature width must be >= 1");
    if (nominal_layer_count() != number_of_layers)
        throw ConfigError("wing stack does not realize the configured layer count");
}

std::size_t CnnConfig::nominal_layer_count() const {
    // Input, Conv, ReLU, Pool, Conv, ReLU, [Conv, ReLU,] Dense, ReLU, Dense,
    // RegressionOutput.
    return number_of_layers == 12 ? 12 : 10;
}

Network CnnConfig::build_network(std::size_t grid_rows, std::size_t grid_cols,
                                 std::uint64_t seed) const {
    std::size_t ph = kernels::pool_out_extent(grid_rows, 2, 2);
    std::size_t pw = kernels::pool_out_extent(grid_cols, 2, 2);
    std::vector<LayerSpec> specs = {
        Conv2D{1, 8, 3, 3, 1, 1},
        Activation{Act::ReLU},
        MaxPool{2, 2, 2},
        Conv2D{8, 16, 3, 3, 1, 1},
        Activation{Act::ReLU},
    };
    if (number_of_layers == 12) {
        specs.push_back(Conv2D{16, 16, 3, 3, 1, 1});
        specs.push_back(Activation{Act::ReLU});
    }
    specs.push_back(Flatten{});
    specs.push_back(Dense{16 * ph * pw, feature_width});
    specs.push_back(Activation{Act::ReLU});
    specs.push_back(Dense{feature_width, 1});
    return Network(specs, {1, grid_rows, grid_cols}, seed);
}

std::size_t CnnConfig::feature_layer_index() const {
    // The ReLU after the penultimate Dense.
    return number_of_layers == 12 ? 9 : 7;
}

TailConfig TailConfig::defaults() {
    TailConfig c;
    c.layers = {{{50, 50, 0.00003, 4, 0.15},
                 {100, 80, 0.00001, 3, 0.1},
                 {100, 200, 0.00002, 4, 0.1},
                 {175, 75, 0.00001, 3, 0.1},
                 {50, 50, 0.00001, 4, 0.1},
                 {100, 250, 0.00001, 5, 0.1},
                 {55, 100, 0.00002, 4, 0.1},
                 {70, 200, 0.00002, 4, 0.1}}};
    return c;
}

void TailConfig::validate() const {
    for (const auto& l : layers) {
        if (l.neurons < 1) throw ConfigError("tail layer neurons must be >= 1");
        if (l.max_epoch < 1) throw ConfigError("tail layer max_epoch must be >= 1");
        if (l.l2_weight < 0) throw ConfigError("tail l2_weight must be >= 0");
        if (l.sparsity_reg < 0) throw ConfigError("tail sparsity_reg must be >= 0");
        if (l.sparsity_prop <= 0 || l.sparsity_prop >= 1)
            throw ConfigError("tail sparsity_prop must be in (0, 1)");
    }
    if (learning_rate <= 0) throw ConfigError("tail learning rate must be > 0");
}

Tensor matrix_to_tensor(const Matrix& m) {
    Tensor t({m.rows, m.cols});
    t.v = m.v;
    return t;
}

Matrix TrainedWing::features(const LagDataset& data) const {
    Matrix out(data.size(), config.feature_width);
    for (std::size_t start = 0; start < data.size(); start += kInferBatch) {
        std::size_t count = std::min(kInferBatch, data.size() - start);
        Matrix f = net.extract_features(data.grid_batch(start, count), feature_layer);
        std::copy(f.v.begin(), f.v.end(), out.row(start));
    }
    return out;
}

std::vector<double> TrainedWing::predict(const LagDataset& data) const {
    std::vector<double> out(data.size());
    for (std::size_t start = 0; start < data.size(); start += kInferBatch) {
        std::size_t count = std::min(kInferBatch, data.size() - start);
        auto fp = net.forward(data.grid_batch(start, count));
        const Tensor& y = fp.acts.back();
        for (std::size_t i = 0; i < count; ++i) out[start + i] = y.v[i];
    }
    return out;
}

TrainedWing train_wing(const CnnConfig& cfg, const LagDataset& train,
                       const LagDataset& val, std::uint64_t seed) {
    cfg.validate();
    TrainedWing wing;
    wing.config = cfg;
    wing.feature_layer = cfg.feature_layer_index();
    wing.net = cfg.build_network(train.spec.grid_rows(), LagSpec::grid_cols(), seed);

    Tensor X = train.grid_batch(0, train.size());
    Tensor Y = train.target_batch(0, train.size());

    SgdMomentumConfig opt;
    opt.learning_rate = cfg.initial_learning_rate;
    opt.momentum = cfg.momentum;
    opt.epochs = cfg.number_of_epochs;
    opt.batch_size = cfg.batch_size;

    MseObjective mse;
    train_network(wing.net, mse, X, Y, opt, [&](std::size_t, double) {
        PredictionSeries p{val.y, wing.predict(val)};
        wing.val_rmse_per_epoch.push_back(rmse(p));
    });
    return wing;
}

namespace {

Matrix encode_with(const Network& ae, const Matrix& X) {
    std::size_t width = 0;
    if (auto* d = std::get_if<Dense>(&ae.specs()[0])) width = d->out;
    Matrix out(X.rows, width);
    for (std::size_t start = 0; start < X.rows; start += kInferBatch) {
        std::size_t count = std::min(kInferBatch, X.rows - start);
        Tensor xb({count, X.cols});
        std::copy(X.row(start), X.row(start) + count * X.cols, xb.data());
        Matrix f = ae.extract_features(xb, 1);  // encoder sigmoid output
        std::copy(f.v.begin(), f.v.end(), out.row(start));
    }
    return out;
}

}  // namespace

Matrix TrainedTail::encode(const Matrix& X) const {
    Matrix codes = X;
    for (const auto& ae : autoencoders) codes = encode_with(ae, codes);
    return codes;
}

std::vector<double> TrainedTail::predict(const Matrix& X) const {
    return network_predict(probe, encode(X));
}

TrainedTail train_tail(const TailConfig& cfg, const LagDataset& train,
                       std::uint64_t seed, const ProbeConfig& probe_cfg) {
    cfg.validate();
    TrainedTail tail;
    tail.config = cfg;

    Matrix codes = train.X;
    for (std::size_t li = 0; li < cfg.layers.size(); ++li) {
        const auto& row = cfg.layers[li];
        std::size_t in = codes.cols;
        Network ae({Dense{in, row.neurons}, Activation{Act::Sigmoid},
                    Dense{row.neurons, in}, Activation{Act::Sigmoid}},
                   {in}, seed + li);
        SparseAeObjective obj({row.l2_weight, row.sparsity_reg, row.sparsity_prop}, 1);
        SgdMomentumConfig opt;
        opt.learning_rate = cfg.learning_rate;
        opt.momentum = cfg.momentum;
        opt.epochs = row.max_epoch;
        opt.batch_size = cfg.batch_size;
        Tensor X = matrix_to_tensor(codes);
        train_network(ae, obj, X, X, opt);
        codes = encode_with(ae, codes);
        tail.autoencoders.push_back(std::move(ae));
    }
    tail.probe = fit_probe(codes, train.y, seed + 100, probe_cfg);
    return tail;
}

Matrix tail_encode(const TrainedTail& tail, const Matrix& X) { return tail.encode(X); }

Network fit_probe(const Matrix& features, const std::vector<double>& targets,
                  std::uint64_t seed, const ProbeConfig& cfg) {
    if (features.rows != targets.size())
        throw ShapeMismatch("probe feature and target row counts differ");
    Network probe({Dense{features.cols, cfg.hidden}, Activation{Act::Sigmoid},
                   Dense{cfg.hidden, 1}},
                  {features.cols}, seed);
    SgdMomentumConfig opt;
    opt.learning_rate = cfg.learning_rate;
    opt.momentum = cfg.momentum;
    opt.epochs = cfg.epochs;
    opt.batch_size = cfg.batch_size;
    Tensor X = matrix_to_tensor(features);
    Tensor Y({targets.size(), 1});
    Y.v.assign(targets.begin(), targets.end());
    MseObjective mse;
    train_network(probe, mse, X, Y, opt);
    return probe;
}

std::vector<double> network_predict(const Network& net, const Matrix& X) {
    std::vector<double> out(X.rows);
    for (std::size_t start = 0; start < X.rows; start += kInferBatch) {
        std::size_t count = std::min(kInferBatch, X.rows - start);
        Tensor xb({count, X.cols});
        std::copy(X.row(start), X.row(start) + count * X.cols, xb.data());
        auto fp = net.forward(xb);
        for (std::size_t i = 0; i < count; ++i) out[start + i] = fp.acts.back().v[i];
    }
    return out;
}

std::vector<double> tail_mean_activations(const TrainedTail& tail, const Matrix& X) {
    std::vector<double> means;
    Matrix codes = X;
    for (const auto& ae : tail.autoencoders) {
        codes = encode_with(ae, codes);
        double s = 0.0;
        for (double v : codes.v) s += v;
        means.push_back(s / (double)codes.v.size());
    }
    return means;
}

}  // namespace deljet
