#include "deljet/losses.hpp"

#include <cmath>

namespace deljet {

namespace {
constexpr double kRhoClamp = 1e-8;

double clamp_rho(double r) {
    if (r < kRhoClamp) return kRhoClamp;
    if (r > 1.0 - kRhoClamp) return 1.0 - kRhoClamp;
    return r;
}
}  // namespace

LossResult mse_loss(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) throw ShapeMismatch("mse_loss shape mismatch");
    LossResult r;
    r.grad = Tensor(pred.shape);
    double inv = 1.0 / (double)pred.size();
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double e = pred.v[i] - target.v[i];
        s += e * e;
        r.grad.v[i] = 2.0 * e * inv;
    }
    r.value = s * inv;
    return r;
}

double kl_bernoulli(double rho, double rho_hat) {
    rho_hat = clamp_rho(rho_hat);
    return rho * std::log(rho / rho_hat) +
           (1.0 - rho) * std::log((1.0 - rho) / (1.0 - rho_hat));
}

std::vector<double> mean_hidden_activation(const Tensor& hidden) {
    std::size_t B = hidden.shape[0];
    std::size_t H = hidden.size() / B;
    std::vector<double> rho_hat(H, 0.0);
    for (std::size_t r = 0; r < B; ++r)
        for (std::size_t j = 0; j < H; ++j) rho_hat[j] += hidden.v[r * H + j];
    for (auto& x : rho_hat) x /= (double)B;
    return rho_hat;
}

SparseAeLossParts sparse_ae_loss(const Tensor& recon, const Tensor& input,
                                 const Tensor& hidden,
                                 const std::vector<const Tensor*>& weights,
                                 const SparseAeLossConfig& cfg) {
    SparseAeLossParts parts;
    parts.mse = mse_loss(recon, input).value;
    for (const Tensor* w : weights)
        for (double x : w->v) parts.l2 += x * x;
    parts.l2 *= cfg.l2_weight;
    for (double rh : mean_hidden_activation(hidden))
        parts.kl += kl_bernoulli(cfg.sparsity_prop, rh);
    parts.kl *= cfg.sparsity_reg;
    parts.total = parts.mse + parts.l2 + parts.kl;
    return parts;
}

double MseObjective::value(const Network& net, const Tensor& x, const Tensor& y) const {
    auto fp = net.forward(x);
    return mse_loss(fp.acts.back(), y).value;
}

Gradients MseObjective::gradients(const Network& net, const Tensor& x, const Tensor& y,
                                  double* value_out) const {
    auto fp = net.forward(x);
    auto loss = mse_loss(fp.acts.back(), y);
    if (value_out) *value_out = loss.value;
    return net.backward(fp, loss.grad);
}

double SparseAeObjective::value(const Network& net, const Tensor& x, const Tensor&) const {
    auto fp = net.forward(x);
    std::vector<const Tensor*> weights;
    for (const auto& p : net.params())
        if (p.count()) weights.push_back(&p.W);
    return sparse_ae_loss(fp.acts.back(), x, fp.acts[hidden_layer_ + 1], weights, cfg_)
        .total;
}

Gradients SparseAeObjective::gradients(const Network& net, const Tensor& x, const Tensor&,
                                       double* value_out) const {
    auto fp = net.forward(x);
    const Tensor& hidden = fp.acts[hidden_layer_ + 1];
    std::vector<const Tensor*> weights;
    for (const auto& p : net.params())
        if (p.count()) weights.push_back(&p.W);

    auto loss = mse_loss(fp.acts.back(), x);
    if (value_out)
        *value_out = sparse_ae_loss(fp.acts.back(), x, hidden, weights, cfg_).total;

    std::size_t B = hidden.shape[0];
    std::size_t H = hidden.size() / B;
    auto rho_hat = mean_hidden_activation(hidden);

    // d(beta * sum_j KL)/dh_ij; a clamped unit contributes zero gradient.
    Tensor kl_grad(hidden.shape);
    double rho = cfg_.sparsity_prop;
    for (std::size_t j = 0; j < H; ++j) {
        double rh = rho_hat[j];
        double d = 0.0;
        if (rh > kRhoClamp && rh < 1.0 - kRhoClamp)
            d = cfg_.sparsity_reg * (-rho / rh + (1.0 - rho) / (1.0 - rh)) / (double)B;
        for (std::size_t r = 0; r < B; ++r) kl_grad.v[r * H + j] = d;
    }
    std::map<std::size_t, Tensor> inject{{hidden_layer_, std::move(kl_grad)}};

    Gradients g = net.backward(fp, loss.grad, &inject);
    for (std::size_t i = 0; i < g.params.size(); ++i)
        if (g.params[i].count())
            for (std::size_t k = 0; k < g.params[i].W.size(); ++k)
                g.params[i].W.v[k] += 2.0 * cfg_.l2_weight * net.params()[i].W.v[k];
    return g;
}

}  // namespace deljet
