#ifndef DELJET_OPTIMIZER_HPP
#define DELJET_OPTIMIZER_HPP

#include <functional>

#include "deljet/losses.hpp"

namespace deljet {

struct SgdMomentumConfig {
    double learning_rate = 0.001;
    double momentum = 0.9;
    std::size_t epochs = 1;
    std::size_t batch_size = 32;

    void validate() const;
};

// Velocity form: v <- momentum*v - lr*g; p <- p + v.
void sgd_momentum_step(std::vector<ParamSet>& params, const std::vector<ParamSet>& grads,
                       std::vector<ParamSet>& velocity, const SgdMomentumConfig& cfg);

struct TrainLog {
    std::vector<double> epoch_loss;  // mean per-batch objective value
};

// Contiguous rows [start, start+count) of a batch-major tensor.
Tensor batch_slice(const Tensor& X, std::size_t start, std::size_t count);

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

// Deterministic mini-batch training: fixed batch order, no shuffling, the
// final short batch included.
TrainLog train_network(Network& net, const Objective& obj, const Tensor& X,
                       const Tensor& Y, const SgdMomentumConfig& cfg,
                       const EpochCallback& on_epoch = nullptr);

}  // namespace deljet

#endif
