#include "deljet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "deljet/io.hpp"
#include "deljet/kernels.hpp"
#include "deljet/rng.hpp"

namespace deljet {

namespace {

using kernels::conv_out_extent;
using kernels::pool_out_extent;

std::vector<std::size_t> out_shape(const LayerSpec& spec,
                                   const std::vector<std::size_t>& in) {
    if (auto* d = std::get_if<Dense>(&spec)) {
        if (in.size() != 1 || in[0] != d->in)
            throw ShapeMismatch("dense layer expects width " + std::to_string(d->in));
        return {d->out};
    }
    if (auto* c = std::get_if<Conv2D>(&spec)) {
        if (in.size() != 3 || in[0] != c->in_c)
            throw ShapeMismatch("conv layer expects " + std::to_string(c->in_c) + " channels");
        return {c->out_c, conv_out_extent(in[1], c->kh, c->stride, c->pad),
                conv_out_extent(in[2], c->kw, c->stride, c->pad)};
    }
    if (auto* p = std::get_if<MaxPool>(&spec)) {
        if (in.size() != 3) throw ShapeMismatch("maxpool expects a CxHxW input");
        if (in[1] < p->h || in[2] < p->w) throw ShapeMismatch("maxpool window exceeds input");
        return {in[0], pool_out_extent(in[1], p->h, p->stride),
                pool_out_extent(in[2], p->w, p->stride)};
    }
    if (std::holds_alternative<Activation>(spec)) return in;
    // Flatten
    std::size_t n = 1;
    for (auto e : in) n *= e;
    return {n};
}

void check_finite(const Tensor& t, const char* where) {
    for (double x : t.v)
        if (!std::isfinite(x)) throw Error(std::string("non-finite value at ") + where);
}

void apply_activation(Act kind, const Tensor& in, Tensor& out) {
    const double* x = in.data();
    double* y = out.data();
    std::size_t n = in.size();
    switch (kind) {
        case Act::ReLU:
            for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0 ? x[i] : 0.0;
            break;
        case Act::Sigmoid:
            for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
            break;
        case Act::Tanh:
            for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
            break;
    }
}

// (B*oh*ow) x outC  <->  B x outC x oh x ow
void planes_to_rows(const double* img, std::size_t batch, std::size_t C,
                    std::size_t hw, double* rows) {
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t p = 0; p < hw; ++p)
                rows[(b * hw + p) * C + c] = img[(b * C + c) * hw + p];
}

void rows_to_planes(const double* rows, std::size_t batch, std::size_t C,
                    std::size_t hw, double* img) {
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t p = 0; p < hw; ++p)
                img[(b * C + c) * hw + p] = rows[(b * hw + p) * C + c];
}

}  // namespace

Network::Network(std::vector<LayerSpec> specs, std::vector<std::size_t> input_shape,
                 std::uint64_t seed)
    : specs_(std::move(specs)), input_shape_(std::move(input_shape)), seed_(seed) {
    // Validate composition up front.
    auto shape = input_shape_;
    for (const auto& s : specs_) shape = out_shape(s, shape);

    Rng rng(seed_);
    params_.resize(specs_.size());
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (auto* d = std::get_if<Dense>(&specs_[i])) {
            double lim = std::sqrt(6.0 / (double)(d->in + d->out));
            params_[i].W = Tensor({d->in, d->out});
            for (auto& w : params_[i].W.v) w = rng.uniform(-lim, lim);
            params_[i].b = Tensor({d->out});
        } else if (auto* c = std::get_if<Conv2D>(&specs_[i])) {
            std::size_t patch = c->in_c * c->kh * c->kw;
            double lim = std::sqrt(6.0 / (double)(patch + c->out_c * c->kh * c->kw));
            params_[i].W = Tensor({c->out_c, patch});
            for (auto& w : params_[i].W.v) w = rng.uniform(-lim, lim);
            params_[i].b = Tensor({c->out_c});
        }
    }
}

std::vector<std::vector<std::size_t>> Network::layer_shapes() const {
    std::vector<std::vector<std::size_t>> shapes;
    auto shape = input_shape_;
    for (const auto& s : specs_) {
        shape = out_shape(s, shape);
        shapes.push_back(shape);
    }
    return shapes;
}

std::size_t Network::output_width() const {
    auto shapes = layer_shapes();
    std::size_t n = 1;
    for (auto e : shapes.back()) n *= e;
    return n;
}

std::size_t Network::param_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.count();
    return n;
}

ForwardPass Network::forward(const Tensor& batch) const {
    if (batch.shape.empty()) throw ShapeMismatch("batch tensor has no shape");
    std::vector<std::size_t> sample(batch.shape.begin() + 1, batch.shape.end());
    if (sample != input_shape_) throw ShapeMismatch("batch shape does not match network input");
    check_finite(batch, "network input");

    std::size_t B = batch.shape[0];
    ForwardPass fp;
    fp.acts.reserve(specs_.size() + 1);
    fp.acts.push_back(batch);
    fp.pool_argmax.resize(specs_.size());

    auto shape = input_shape_;
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        const Tensor& x = fp.acts.back();
        auto os = out_shape(specs_[i], shape);
        std::vector<std::size_t> full = {B};
        full.insert(full.end(), os.begin(), os.end());
        Tensor y(full);

        if (auto* d = std::get_if<Dense>(&specs_[i])) {
            kernels::gemm(B, d->out, d->in, x.data(), params_[i].W.data(), y.data());
            const double* b = params_[i].b.data();
            for (std::size_t r = 0; r < B; ++r)
                for (std::size_t j = 0; j < d->out; ++j) y.v[r * d->out + j] += b[j];
        } else if (auto* c = std::get_if<Conv2D>(&specs_[i])) {
            std::size_t H = shape[1], W = shape[2];
            std::size_t oh = os[1], ow = os[2], hw = oh * ow;
            std::size_t patch = c->in_c * c->kh * c->kw;
            std::vector<double> cols(B * hw * patch);
            kernels::im2col(x.data(), B, c->in_c, H, W, c->kh, c->kw, c->stride, c->pad,
                            cols.data());
            std::vector<double> wt(patch * c->out_c);
            kernels::transpose(c->out_c, patch, params_[i].W.data(), wt.data());
            std::vector<double> out_rows(B * hw * c->out_c);
            kernels::gemm(B * hw, c->out_c, patch, cols.data(), wt.data(), out_rows.data());
            const double* b = params_[i].b.data();
            for (std::size_t r = 0; r < B * hw; ++r)
                for (std::size_t oc = 0; oc < c->out_c; ++oc)
                    out_rows[r * c->out_c + oc] += b[oc];
            rows_to_planes(out_rows.data(), B, c->out_c, hw, y.data());
        } else if (auto* p = std::get_if<MaxPool>(&specs_[i])) {
            std::size_t hw = os[1] * os[2];
            fp.pool_argmax[i].resize(B * shape[0] * hw);
            kernels::maxpool_forward(x.data(), B, shape[0], shape[1], shape[2], p->h, p->w,
                                     p->stride, y.data(), fp.pool_argmax[i].data());
        } else if (auto* a = std::get_if<Activation>(&specs_[i])) {
            apply_activation(a->kind, x, y);
        } else {
            y.v = x.v;  // Flatten
        }
        check_finite(y, "layer output");
        fp.acts.push_back(std::move(y));
        shape = os;
    }
    return fp;
}

Gradients Network::zero_gradients() const {
    Gradients g;
    g.params.resize(specs_.size());
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (params_[i].count()) {
            g.params[i].W = Tensor(params_[i].W.shape);
            g.params[i].b = Tensor(params_[i].b.shape);
        }
    }
    return g;
}

Gradients Network::backward(const ForwardPass& fp, const Tensor& upstream,
                            const std::map<std::size_t, Tensor>* inject) const {
    if (fp.acts.size() != specs_.size() + 1)
        throw ShapeMismatch("forward pass does not match network");
    if (!upstream.same_shape(fp.acts.back()))
        throw ShapeMismatch("upstream gradient shape mismatch");

    std::size_t B = fp.acts[0].shape[0];
    Gradients g = zero_gradients();
    auto shapes = layer_shapes();

    Tensor grad = upstream;  // dLoss/d(acts[i+1]) while processing layer i
    for (std::size_t ir = specs_.size(); ir-- > 0;) {
        if (inject) {
            auto it = inject->find(ir);
            if (it != inject->end()) {
                if (!it->second.same_shape(grad))
                    throw ShapeMismatch("injected gradient shape mismatch");
                for (std::size_t k = 0; k < grad.size(); ++k) grad.v[k] += it->second.v[k];
            }
        }

        const Tensor& x = fp.acts[ir];
        const Tensor& y = fp.acts[ir + 1];
        Tensor dx(x.shape);

        if (auto* d = std::get_if<Dense>(&specs_[ir])) {
            // gW = X^T dY, gb = column sums, dX = dY W^T
            std::vector<double> xt(d->in * B);
            kernels::transpose(B, d->in, x.data(), xt.data());
            kernels::gemm(d->in, d->out, B, xt.data(), grad.data(), g.params[ir].W.data());
            for (std::size_t r = 0; r < B; ++r)
                for (std::size_t j = 0; j < d->out; ++j)
                    g.params[ir].b.v[j] += grad.v[r * d->out + j];
            std::vector<double> wt(d->out * d->in);
            kernels::transpose(d->in, d->out, params_[ir].W.data(), wt.data());
            kernels::gemm(B, d->in, d->out, grad.data(), wt.data(), dx.data());
        } else if (auto* c = std::get_if<Conv2D>(&specs_[ir])) {
            auto in_s = ir == 0 ? input_shape_ : shapes[ir - 1];
            std::size_t H = in_s[1], W = in_s[2];
            std::size_t oh = shapes[ir][1], ow = shapes[ir][2], hw = oh * ow;
            std::size_t patch = c->in_c * c->kh * c->kw;

            std::vector<double> cols(B * hw * patch);
            kernels::im2col(x.data(), B, c->in_c, H, W, c->kh, c->kw, c->stride, c->pad,
                            cols.data());
            std::vector<double> dout_rows(B * hw * c->out_c);
            planes_to_rows(grad.data(), B, c->out_c, hw, dout_rows.data());

            std::vector<double> dout_t(c->out_c * B * hw);
            kernels::transpose(B * hw, c->out_c, dout_rows.data(), dout_t.data());
            kernels::gemm(c->out_c, patch, B * hw, dout_t.data(), cols.data(),
                          g.params[ir].W.data());
            for (std::size_t r = 0; r < B * hw; ++r)
                for (std::size_t oc = 0; oc < c->out_c; ++oc)
                    g.params[ir].b.v[oc] += dout_rows[r * c->out_c + oc];

            std::vector<double> dcols(B * hw * patch);
            kernels::gemm(B * hw, patch, c->out_c, dout_rows.data(), params_[ir].W.data(),
                          dcols.data());
            std::fill(dx.v.begin(), dx.v.end(), 0.0);
            kernels::col2im(dcols.data(), B, c->in_c, H, W, c->kh, c->kw, c->stride,
                            c->pad, dx.data());
        } else if (std::holds_alternative<MaxPool>(specs_[ir])) {
            kernels::maxpool_backward(grad.data(), fp.pool_argmax[ir].data(), grad.size(),
                                      dx.size(), dx.data());
        } else if (auto* a = std::get_if<Activation>(&specs_[ir])) {
            switch (a->kind) {
                case Act::ReLU:
                    for (std::size_t k = 0; k < dx.size(); ++k)
                        dx.v[k] = x.v[k] > 0 ? grad.v[k] : 0.0;
                    break;
                case Act::Sigmoid:
                    for (std::size_t k = 0; k < dx.size(); ++k)
                        dx.v[k] = grad.v[k] * y.v[k] * (1.0 - y.v[k]);
                    break;
                case Act::Tanh:
                    for (std::size_t k = 0; k < dx.size(); ++k)
                        dx.v[k] = grad.v[k] * (1.0 - y.v[k] * y.v[k]);
                    break;
            }
        } else {
            dx.v = grad.v;  // Flatten
        }
        grad = std::move(dx);
    }
    g.input = std::move(grad);
    return g;
}

Matrix Network::extract_features(const Tensor& batch, std::size_t layer_index) const {
    if (layer_index >= specs_.size())
        throw IndexOutOfRange("layer index " + std::to_string(layer_index) +
                              " out of range for " + std::to_string(specs_.size()) +
                              " layers");
    auto fp = forward(batch);
    const Tensor& a = fp.acts[layer_index + 1];
    std::size_t B = a.shape[0];
    std::size_t width = a.size() / B;
    Matrix m(B, width);
    m.v = a.v;
    return m;
}

namespace {
constexpr char kMagic[] = "DJNET1";
}

void Network::save(std::ostream& os) const {
    os.write(kMagic, 6);
    io::write_u64(os, seed_);
    io::write_u64(os, input_shape_.size());
    for (auto e : input_shape_) io::write_u64(os, e);
    io::write_u64(os, specs_.size());
    for (const auto& s : specs_) {
        if (auto* d = std::get_if<Dense>(&s)) {
            io::write_u8(os, 0);
            io::write_u64(os, d->in);
            io::write_u64(os, d->out);
        } else if (auto* c = std::get_if<Conv2D>(&s)) {
            io::write_u8(os, 1);
            io::write_u64(os, c->in_c);
            io::write_u64(os, c->out_c);
            io::write_u64(os, c->kh);
            io::write_u64(os, c->kw);
            io::write_u64(os, c->stride);
            io::write_u64(os, c->pad);
        } else if (auto* p = std::get_if<MaxPool>(&s)) {
            io::write_u8(os, 2);
            io::write_u64(os, p->h);
            io::write_u64(os, p->w);
            io::write_u64(os, p->stride);
        } else if (auto* a = std::get_if<Activation>(&s)) {
            io::write_u8(os, 3);
            io::write_u8(os, (std::uint8_t)a->kind);
        } else {
            io::write_u8(os, 4);
        }
    }
    for (const auto& p : params_) {
        io::write_f64_array(os, p.W.v);
        io::write_f64_array(os, p.b.v);
    }
}

Network Network::load(std::istream& is) {
    char magic[6];
    is.read(magic, 6);
    if (is.gcount() != 6 || std::memcmp(magic, kMagic, 6) != 0)
        throw LoadError("not a network container");
    std::uint64_t seed = io::read_u64(is);
    std::vector<std::size_t> in_shape(io::read_u64(is));
    for (auto& e : in_shape) e = io::read_u64(is);
    std::vector<LayerSpec> specs(io::read_u64(is));
    for (auto& s : specs) {
        switch (io::read_u8(is)) {
            case 0: {
                Dense d{io::read_u64(is), io::read_u64(is)};
                s = d;
                break;
            }
            case 1: {
                Conv2D c{};
                c.in_c = io::read_u64(is);
                c.out_c = io::read_u64(is);
                c.kh = io::read_u64(is);
                c.kw = io::read_u64(is);
                c.stride = io::read_u64(is);
                c.pad = io::read_u64(is);
                s = c;
                break;
            }
            case 2: {
                MaxPool p{};
                p.h = io::read_u64(is);
                p.w = io::read_u64(is);
                p.stride = io::read_u64(is);
                s = p;
                break;
            }
            case 3:
                s = Activation{(Act)io::read_u8(is)};
                break;
            case 4:
                s = Flatten{};
                break;
            default:
                throw LoadError("unknown layer tag");
        }
    }
    Network net(specs, in_shape, seed);
    for (auto& p : net.params_) {
        auto w = io::read_f64_array(is);
        auto b = io::read_f64_array(is);
        if (w.size() != p.W.size() || b.size() != p.b.size())
            throw LoadError("parameter buffer size mismatch");
        p.W.v = std::move(w);
        p.b.v = std::move(b);
    }
    return net;
}

bool Network::operator==(const Network& o) const {
    if (specs_.size() != o.specs_.size() || input_shape_ != o.input_shape_ ||
        seed_ != o.seed_)
        return false;
    for (std::size_t i = 0; i < params_.size(); ++i)
        if (params_[i].W.v != o.params_[i].W.v || params_[i].b.v != o.params_[i].b.v)
            return false;
    return true;
}

}  // namespace deljet
