#ifndef DELJET_LOSSES_HPP
#define DELJET_LOSSES_HPP

#include "deljet/layers.hpp"

namespace deljet {

struct LossResult {
    double value = 0.0;
    Tensor grad;  // dLoss / dPrediction
};

// Mean squared error over every element of the batch.
LossResult mse_loss(const Tensor& pred, const Tensor& target);

// KL divergence between Bernoulli(rho) and Bernoulli(rho_hat).
double kl_bernoulli(double rho, double rho_hat);

struct SparseAeLossConfig {
    double l2_weight = 0.0;      // lambda, on the squared weight norm
    double sparsity_reg = 0.0;   // beta, on the KL term
    double sparsity_prop = 0.1;  // rho, desired mean hidden activation
};

// Batch-mean activation per hidden unit, clamped away from {0,1} so the KL
// term stays finite at saturated units.
std::vector<double> mean_hidden_activation(const Tensor& hidden);

struct SparseAeLossParts {
    double total = 0.0, mse = 0.0, l2 = 0.0, kl = 0.0;
};

SparseAeLossParts sparse_ae_loss(const Tensor& recon, const Tensor& input,
                                 const Tensor& hidden,
                                 const std::vector<const Tensor*>& weights,
                                 const SparseAeLossConfig& cfg);

// A differentiable training objective over a network.
class Objective {
public:
    virtual ~Objective() = default;
    virtual double value(const Network& net, const Tensor& x, const Tensor& y) const = 0;
    virtual Gradients gradients(const Network& net, const Tensor& x, const Tensor& y,
                                double* value_out = nullptr) const = 0;
};

class MseObjective final : public Objective {
public:
    double value(const Network& net, const Tensor& x, const Tensor& y) const override;
    Gradients gradients(const Network& net, const Tensor& x, const Tensor& y,
                        double* value_out) const override;
};

// Reconstruction objective for a [Dense, Sigmoid, Dense, Sigmoid] autoencoder.
// The target tensor is ignored; the input reconstructs itself.
class SparseAeObjective final : public Objective {
public:
    SparseAeObjective(SparseAeLossConfig cfg, std::size_t hidden_layer_index)
        : cfg_(cfg), hidden_layer_(hidden_layer_index) {}

    double value(const Network& net, const Tensor& x, const Tensor& y) const override;
    Gradients gradients(const Network& net, const Tensor& x, const Tensor& y,
                        double* value_out) const override;

    const SparseAeLossConfig& config() const { return cfg_; }

private:
    SparseAeLossConfig cfg_;
    std::size_t hidden_layer_;  // index of the encoder's activation layer
};

}  // namespace deljet

#endif
