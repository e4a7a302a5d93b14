#include "deljet/gradcheck.hpp"

#include <cmath>

#include "deljet/rng.hpp"

namespace deljet {

namespace {

double rel_err(double a, double n) {
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-12});
}

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo, double hi) {
    Tensor t(std::move(shape));
    for (auto& x : t.v) x = rng.uniform(lo, hi);
    return t;
}

// Reject seeds that put a ReLU pre-activation or a pooling margin within the
// finite-difference window, where the loss is not differentiable.
bool away_from_kinks(const Network& net, const Tensor& x, double margin) {
    auto fp = net.forward(x);
    const auto& specs = net.specs();
    auto shapes = net.layer_shapes();
    std::size_t B = x.shape[0];
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (auto* a = std::get_if<Activation>(&specs[i])) {
            if (a->kind == Act::ReLU)
                for (double v : fp.acts[i].v)
                    if (std::abs(v) < margin) return false;
        } else if (auto* p = std::get_if<MaxPool>(&specs[i])) {
            // Winner-vs-runner-up margin inside every pooling window.
            const auto& in_s = i == 0 ? net.input_shape() : shapes[i - 1];
            std::size_t C = in_s[0], H = in_s[1], W = in_s[2];
            std::size_t oh = shapes[i][1], ow = shapes[i][2];
            const double* in = fp.acts[i].data();
            for (std::size_t plane = 0; plane < B * C; ++plane)
                for (std::size_t y = 0; y < oh; ++y)
                    for (std::size_t xx = 0; xx < ow; ++xx) {
                        double best = -1e300, second = -1e300;
                        for (std::size_t dy = 0; dy < p->h; ++dy)
                            for (std::size_t dx = 0; dx < p->w; ++dx) {
                                double v = in[plane * H * W + (y * p->stride + dy) * W +
                                              (xx * p->stride + dx)];
                                if (v > best) {
                                    second = best;
                                    best = v;
                                } else if (v > second) {
                                    second = v;
                                }
                            }
                        if (best - second < margin) return false;
                    }
        }
    }
    return true;
}

}  // namespace

double grad_check(Network& net, const Objective& obj, const Tensor& x, const Tensor& y,
                  double epsilon) {
    Gradients analytic = obj.gradients(net, x, y, nullptr);
    double worst = 0.0;
    for (std::size_t i = 0; i < net.params().size(); ++i) {
        auto check_tensor = [&](Tensor& p, const Tensor& a) {
            for (std::size_t k = 0; k < p.size(); ++k) {
                double orig = p.v[k];
                p.v[k] = orig + epsilon;
                double up = obj.value(net, x, y);
                p.v[k] = orig - epsilon;
                double down = obj.value(net, x, y);
                p.v[k] = orig;
                double numeric = (up - down) / (2.0 * epsilon);
                worst = std::max(worst, rel_err(a.v[k], numeric));
            }
        };
        check_tensor(net.params()[i].W, analytic.params[i].W);
        check_tensor(net.params()[i].b, analytic.params[i].b);
    }
    return worst;
}

std::vector<GradCheckCase> grad_check_menu(std::uint64_t seed, double tolerance,
                                           double epsilon) {
    std::vector<GradCheckCase> cases;
    MseObjective mse;

    auto run = [&](const std::string& name, Network net, const Objective& obj,
                   double in_lo, double in_hi, bool check_kinks) {
        std::size_t B = 4;
        std::size_t out_w = net.output_width();
        for (std::uint64_t attempt = 0;; ++attempt) {
            Rng rng(seed * 7919 + attempt * 131 + std::hash<std::string>{}(name));
            std::vector<std::size_t> xs = {B};
            for (auto e : net.input_shape()) xs.push_back(e);
            Tensor x = random_tensor(xs, rng, in_lo, in_hi);
            Tensor y = random_tensor({B, out_w}, rng, in_lo, in_hi);
            if (check_kinks && !away_from_kinks(net, x, 1e-3)) continue;
            double err = grad_check(net, obj, x, y, epsilon);
            cases.push_back({name, err, err < tolerance});
            return;
        }
    };

    run("dense-linear-mse", Network({Dense{5, 3}}, {5}, seed + 1), mse, -1.0, 1.0, false);
    run("dense-sigmoid-mse",
        Network({Dense{6, 8}, Activation{Act::Sigmoid}, Dense{8, 2}}, {6}, seed + 2), mse,
        -1.0, 1.0, false);
    run("dense-tanh-mse",
        Network({Dense{6, 5}, Activation{Act::Tanh}, Dense{5, 1}}, {6}, seed + 3), mse,
        -1.0, 1.0, false);
    run("conv-relu-dense-mse",
        Network({Conv2D{1, 3, 3, 3, 1, 1}, Activation{Act::ReLU}, Flatten{},
                 Dense{3 * 6 * 7, 4}},
                {1, 6, 7}, seed + 4),
        mse, -1.0, 1.0, true);
    run("conv-maxpool-dense-mse",
        Network({Conv2D{1, 2, 3, 3, 1, 1}, Activation{Act::ReLU}, MaxPool{2, 2, 2},
                 Flatten{}, Dense{2 * 3 * 3, 2}},
                {1, 6, 7}, seed + 5),
        mse, -1.0, 1.0, true);
    SparseAeObjective sparse({0.01, 3.0, 0.1}, 1);
    run("sparse-ae-loss",
        Network({Dense{7, 4}, Activation{Act::Sigmoid}, Dense{4, 7},
                 Activation{Act::Sigmoid}},
                {7}, seed + 6),
        sparse, 0.1, 0.9, false);

    return cases;
}

}  // namespace deljet
