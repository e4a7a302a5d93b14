#ifndef DELJET_MODELS_HPP
#define DELJET_MODELS_HPP

#include <array>
#include <string>

#include "deljet/dataset.hpp"
#include "deljet/losses.hpp"
#include "deljet/optimizer.hpp"

namespace deljet {

// One CNN wing. The nominal layer count follows the convention that input,
// conv, activation, pooling, fully-connected and the regression output each
// count as one layer, while Flatten is bookkeeping and counts as none.
struct CnnConfig {
    std::string name;
    std::size_t number_of_layers = 10;
    std::size_t number_of_epochs = 5;
    double initial_learning_rate = 0.001;
    double momentum = 0.9;
    std::size_t batch_size = 32;
    std::size_t feature_width = 128;  // penultimate fully-connected width

    static CnnConfig wing1_default();
    static CnnConfig wing2_default();

    void validate() const;
    Network build_network(std::size_t grid_rows, std::size_t grid_cols,
                          std::uint64_t seed) const;
    // Index of the penultimate fully-connected activation in the built stack.
    std::size_t feature_layer_index() const;
    std::size_t nominal_layer_count() const;
};

struct TailLayerConfig {
    std::size_t neurons;
    std::size_t max_epoch;
    double l2_weight;
    double sparsity_reg;
    double sparsity_prop;
};

struct TailConfig {
    std::array<TailLayerConfig, 8> layers;
    double learning_rate = 0.001;
    double momentum = 0.9;
    std::size_t batch_size = 32;

    static TailConfig defaults();
    void validate() const;
};

struct ProbeConfig {
    std::size_t hidden = 26;
    std::size_t epochs = 200;
    double learning_rate = 0.001;
    double momentum = 0.9;
    std::size_t batch_size = 32;
};

struct TrainedWing {
    CnnConfig config;
    Network net;
    std::size_t feature_layer = 0;
    std::vector<double> val_rmse_per_epoch;  // scaled units

    Matrix features(const LagDataset& data) const;
    std::vector<double> predict(const LagDataset& data) const;  // scaled units
};

struct TrainedTail {
    TailConfig config;
    std::vector<Network> autoencoders;  // greedy stack; encoder = layers 0..1
    Network probe;                      // deepest code -> scaled target

    Matrix encode(const Matrix& X) const;
    std::vector<double> predict(const Matrix& X) const;  // scaled units
};

TrainedWing train_wing(const CnnConfig& cfg, const LagDataset& train,
                       const LagDataset& val, std::uint64_t seed);

TrainedTail train_tail(const TailConfig& cfg, const LagDataset& train,
                       std::uint64_t seed,
                       const ProbeConfig& probe_cfg = ProbeConfig{});

Matrix tail_encode(const TrainedTail& tail, const Matrix& X);

// 26-unit single-hidden-layer MLP used to score feature spaces.
Network fit_probe(const Matrix& features, const std::vector<double>& targets,
                  std::uint64_t seed, const ProbeConfig& cfg = ProbeConfig{});

std::vector<double> network_predict(const Network& net, const Matrix& X);

// Mean hidden activation (over units and samples) of each stacked layer.
std::vector<double> tail_mean_activations(const TrainedTail& tail, const Matrix& X);

Tensor matrix_to_tensor(const Matrix& m);

}  // namespace deljet

#endif
