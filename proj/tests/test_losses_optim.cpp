#include <doctest.h>

#include <cmath>

#include "deljet/optimizer.hpp"

using namespace deljet;

TEST_CASE("mse_loss value and gradient") {
    Tensor pred{{2, 1}, {1.0, 2.0}};
    Tensor target{{2, 1}, {0.5, 2.5}};
    auto r = mse_loss(pred, target);
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-15));  // (0.25+0.25)/2
    CHECK(r.grad.v[0] == doctest::Approx(0.5).epsilon(1e-15));   // 2*0.5/2
    CHECK(r.grad.v[1] == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("kl_bernoulli frozen values") {
    // rho ln(rho/rho_hat) + (1-rho) ln((1-rho)/(1-rho_hat))
    double v = kl_bernoulli(0.1, 0.2);
    double expect = 0.1 * std::log(0.5) + 0.9 * std::log(0.9 / 0.8);
    CHECK(v == doctest::Approx(expect).epsilon(1e-15));
    CHECK(v == doctest::Approx(0.036690014034750584).epsilon(1e-12));
    CHECK(kl_bernoulli(0.1, 0.1) == doctest::Approx(0.0).epsilon(1e-15));
    // Saturated rho_hat stays finite via the clamp.
    CHECK(std::isfinite(kl_bernoulli(0.1, 0.0)));
    CHECK(std::isfinite(kl_bernoulli(0.1, 1.0)));
}

TEST_CASE("mean_hidden_activation averages over the batch per unit") {
    Tensor h{{2, 3}, {0.0, 0.5, 1.0, 1.0, 0.5, 0.0}};
    auto m = mean_hidden_activation(h);
    REQUIRE(m.size() == 3);
    CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sparse_ae_loss reduces to mse when lambda=beta=0") {
    Tensor input{{2, 2}, {0.1, 0.2, 0.3, 0.4}};
    Tensor recon{{2, 2}, {0.2, 0.2, 0.2, 0.2}};
    Tensor hidden{{2, 3}, {0.5, 0.1, 0.9, 0.4, 0.2, 0.8}};
    Tensor W{{3, 2}, {1, 2, 3, 4, 5, 6}};
    SparseAeLossConfig cfg;  // zeros
    auto parts = sparse_ae_loss(recon, input, hidden, {&W}, cfg);
    auto plain = mse_loss(recon, input);
    CHECK(parts.total == doctest::Approx(plain.value).epsilon(1e-15));
    CHECK(parts.l2 == 0.0);
    CHECK(parts.kl == 0.0);
}

TEST_CASE("sparse_ae_loss adds the weight decay and KL terms") {
    Tensor input{{1, 2}, {0.0, 0.0}};
    Tensor recon{{1, 2}, {0.0, 0.0}};
    Tensor hidden{{1, 2}, {0.2, 0.2}};
    Tensor W{{2, 2}, {1, -1, 2, -2}};
    SparseAeLossConfig cfg{0.5, 3.0, 0.1};
    auto parts = sparse_ae_loss(recon, input, hidden, {&W}, cfg);
    CHECK(parts.mse == 0.0);
    CHECK(parts.l2 == doctest::Approx(0.5 * 10.0).epsilon(1e-15));
    CHECK(parts.kl == doctest::Approx(3.0 * 2 * kl_bernoulli(0.1, 0.2)).epsilon(1e-12));
    CHECK(parts.total == doctest::Approx(parts.mse + parts.l2 + parts.kl).epsilon(1e-15));
}

TEST_CASE("sgd momentum follows the velocity form") {
    // v <- m*v - lr*g; p <- p + v. Two steps with constant gradient g=1,
    // lr=0.001, m=0.9: dp1 = -0.001, dp2 = -0.0019.
    Network net({Dense{1, 1}}, {1}, 0);
    net.params()[0].W.v = {1.0};
    net.params()[0].b.v = {0.0};
    auto grads = net.zero_gradients();
    grads.params[0].W.v = {1.0};
    auto velocity = net.zero_gradients();
    SgdMomentumConfig cfg;
    cfg.learning_rate = 0.001;
    cfg.momentum = 0.9;

    auto params = net.params();
    sgd_momentum_step(params, grads.params, velocity.params, cfg);
    CHECK(params[0].W.v[0] == doctest::Approx(1.0 - 0.001).epsilon(1e-15));
    sgd_momentum_step(params, grads.params, velocity.params, cfg);
    CHECK(params[0].W.v[0] == doctest::Approx(1.0 - 0.001 - 0.0019).epsilon(1e-13));
}

TEST_CASE("batch_slice takes contiguous rows") {
    Tensor X{{4, 2}, {1, 2, 3, 4, 5, 6, 7, 8}};
    Tensor s = batch_slice(X, 1, 2);
    CHECK(s.shape == std::vector<std::size_t>{2, 2});
    CHECK(s.v == std::vector<double>{3, 4, 5, 6});
}

TEST_CASE("train_network is deterministic and reduces loss") {
    auto make = [] {
        Network net({Dense{2, 8}, Activation{Act::Tanh}, Dense{8, 1}}, {2}, 11);
        return net;
    };
    // y = x0 + x1 on a fixed grid.
    std::vector<double> xs, ys;
    for (int i = 0; i < 40; ++i) {
        double a = (i % 8) / 8.0, b = (i / 8) / 5.0;
        xs.push_back(a);
        xs.push_back(b);
        ys.push_back(a + b);
    }
    Tensor X{{40, 2}, xs}, Y{{40, 1}, ys};
    MseObjective obj;
    SgdMomentumConfig cfg;
    cfg.epochs = 30;
    cfg.learning_rate = 0.05;

    Network n1 = make(), n2 = make();
    TrainLog l1 = train_network(n1, obj, X, Y, cfg);
    TrainLog l2 = train_network(n2, obj, X, Y, cfg);
    CHECK(n1 == n2);
    CHECK(l1.epoch_loss == l2.epoch_loss);
    CHECK(l1.epoch_loss.back() < l1.epoch_loss.front());
}

TEST_CASE("train_network includes the final short batch") {
    Network net({Dense{1, 1}}, {1}, 3);
    Tensor X{{5, 1}, {1, 1, 1, 1, 100.0}};  // last row only in the short batch
    Tensor Y{{5, 1}, {0, 0, 0, 0, 0}};
    MseObjective obj;
    SgdMomentumConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 4;
    Network before = net;
    train_network(net, obj, X, Y, cfg);
    // Two steps happened; the short batch's large input must have moved the
    // weight differently than training on the first four rows alone.
    Network net2 = before;
    Tensor X4 = batch_slice(X, 0, 4), Y4 = batch_slice(Y, 0, 4);
    train_network(net2, obj, X4, Y4, cfg);
    CHECK(net.params()[0].W.v != net2.params()[0].W.v);
}

TEST_CASE("config validation") {
    SgdMomentumConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
