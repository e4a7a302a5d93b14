#include "deljet/optimizer.hpp"

#include <algorithm>
#include <cstring>

namespace deljet {

void SgdMomentumConfig::validate() const {
    if (learning_rate <= 0) throw ConfigError("learning_rate must be > 0");
    if (momentum < 0 || momentum >= 1) throw ConfigError("momentum must be in [0, 1)");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

void sgd_momentum_step(std::vector<ParamSet>& params, const std::vector<ParamSet>& grads,
                       std::vector<ParamSet>& velocity, const SgdMomentumConfig& cfg) {
    if (params.size() != grads.size() || params.size() != velocity.size())
        throw ShapeMismatch("sgd_momentum_step argument counts differ");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].W.size() != grads[i].W.size() ||
            params[i].W.size() != velocity[i].W.size() ||
            params[i].b.size() != grads[i].b.size() ||
            params[i].b.size() != velocity[i].b.size())
            throw ShapeMismatch("sgd_momentum_step parameter shapes differ");
        auto update = [&](Tensor& p, const Tensor& g, Tensor& v) {
            for (std::size_t k = 0; k < p.size(); ++k) {
                v.v[k] = cfg.momentum * v.v[k] - cfg.learning_rate * g.v[k];
                p.v[k] += v.v[k];
            }
        };
        update(params[i].W, grads[i].W, velocity[i].W);
        update(params[i].b, grads[i].b, velocity[i].b);
    }
}

Tensor batch_slice(const Tensor& X, std::size_t start, std::size_t count) {
    std::size_t N = X.shape[0];
    if (start + count > N) throw IndexOutOfRange("batch slice out of range");
    std::size_t stride = X.size() / N;
    std::vector<std::size_t> shape = X.shape;
    shape[0] = count;
    Tensor out(shape);
    std::memcpy(out.data(), X.data() + start * stride, count * stride * sizeof(double));
    return out;
}

TrainLog train_network(Network& net, const Objective& obj, const Tensor& X,
                       const Tensor& Y, const SgdMomentumConfig& cfg,
                       const EpochCallback& on_epoch) {
    cfg.validate();
    std::size_t N = X.shape[0];
    if (Y.shape[0] != N) throw ShapeMismatch("training inputs and targets differ in rows");

    std::vector<ParamSet> velocity;
    {
        auto zeros = net.zero_gradients();
        velocity = std::move(zeros.params);
    }

    TrainLog log;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double sum = 0.0;
        std::size_t nb = 0;
        for (std::size_t start = 0; start < N; start += cfg.batch_size) {
            std::size_t count = std::min(cfg.batch_size, N - start);
            Tensor xb = batch_slice(X, start, count);
            Tensor yb = batch_slice(Y, start, count);
            double value = 0.0;
            Gradients g = obj.gradients(net, xb, yb, &value);
            sgd_momentum_step(net.params(), g.params, velocity, cfg);
            sum += value;
            ++nb;
        }
        double mean = sum / (double)nb;
        log.epoch_loss.push_back(mean);
        if (on_epoch) on_epoch(epoch, mean);
    }
    return log;
}

}  // namespace deljet
