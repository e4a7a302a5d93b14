#ifndef DELJET_LAYERS_HPP
#define DELJET_LAYERS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <variant>
#include <vector>

#include "deljet/tensor.hpp"

namespace deljet {

enum class Act { ReLU, Sigmoid, Tanh };

struct Dense {
    std::size_t in, out;
};
struct Conv2D {
    std::size_t in_c, out_c, kh, kw, stride, pad;
};
struct MaxPool {
    std::size_t h, w, stride;
};
struct Activation {
    Act kind;
};
struct Flatten {};

using LayerSpec = std::variant<Dense, Conv2D, MaxPool, Activation, Flatten>;

// Weight and bias of one parametric layer; empty for the rest.
struct ParamSet {
    Tensor W, b;
    std::size_t count() const { return W.size() + b.size(); }
};

// Everything forward produces that backward needs.
struct ForwardPass {
    std::vector<Tensor> acts;                      // acts[0] = input, acts[i] = layer i-1 output
    std::vector<std::vector<std::int64_t>> pool_argmax;  // per layer, empty unless MaxPool
};

struct Gradients {
    std::vector<ParamSet> params;  // aligned with network layers
    Tensor input;
};

// A sequential stack of differentiable layers. Single-writer during training;
// const access is safe to share.
class Network {
public:
    Network() = default;
    Network(std::vector<LayerSpec> specs, std::vector<std::size_t> input_shape,
            std::uint64_t seed);

    ForwardPass forward(const Tensor& batch) const;

    // upstream is dLoss/dOutput. inject adds extra gradient terms at the output
    // of the named layers (used by the sparsity penalty).
    Gradients backward(const ForwardPass& fp, const Tensor& upstream,
                       const std::map<std::size_t, Tensor>* inject = nullptr) const;

    // Flattened activations of layer `layer_index`, one row per sample.
    Matrix extract_features(const Tensor& batch, std::size_t layer_index) const;

    Gradients zero_gradients() const;

    const std::vector<LayerSpec>& specs() const { return specs_; }
    const std::vector<ParamSet>& params() const { return params_; }
    std::vector<ParamSet>& params() { return params_; }
    const std::vector<std::size_t>& input_shape() const { return input_shape_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t num_layers() const { return specs_.size(); }
    std::size_t param_count() const;

    // Shape of layer outputs for a batch of one, including the output layer.
    std::vector<std::vector<std::size_t>> layer_shapes() const;
    std::size_t output_width() const;

    void save(std::ostream& os) const;
    static Network load(std::istream& is);

    bool operator==(const Network& o) const;

private:
    std::vector<LayerSpec> specs_;
    std::vector<ParamSet> params_;
    std::vector<std::size_t> input_shape_;
    std::uint64_t seed_ = 0;
};

}  // namespace deljet

#endif
