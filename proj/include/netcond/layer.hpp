#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "netcond/errors.hpp"
#include "netcond/tensor.hpp"

namespace netcond {

enum class LayerKind {
    dense,
    conv2d,
    relu,
    leaky_relu,
    elu,
    sigmoid,
    tanh,
    flatten,
    maxpool,
    avgpool,
};

inline const char* kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::dense: return "dense";
        case LayerKind::conv2d: return "conv2d";
        case LayerKind::relu: return "relu";
        case LayerKind::leaky_relu: return "leaky_relu";
        case LayerKind::elu: return "elu";
        case LayerKind::sigmoid: return "sigmoid";
        case LayerKind::tanh: return "tanh";
        case LayerKind::flatten: return "flatten";
        case LayerKind::maxpool: return "maxpool";
        case LayerKind::avgpool: return "avgpool";
    }
    return "?";
}

inline bool is_activation(LayerKind k) {
    return k == LayerKind::relu || k == LayerKind::leaky_relu || k == LayerKind::elu ||
           k == LayerKind::sigmoid || k == LayerKind::tanh;
}

// One network layer. Weight/bias are set for dense and conv2d only; bias may
// be empty. Pooling windows are square and non-overlapping (window == stride),
// which keeps both pools 1-Lipschitz in the Euclidean norm.
struct Layer {
    LayerKind kind = LayerKind::relu;
    Tensor weight;            // dense: (out, in); conv2d: (oc, ic, kh, kw)
    Tensor bias;              // dense: (out); conv2d: (oc); empty if absent
    double alpha = 0.0;       // leaky_relu / elu slope, 0 < alpha <= 1
    std::size_t window = 0;   // maxpool / avgpool
    std::size_t stride = 0;   // conv2d / pools
    std::size_t pad = 0;      // conv2d zero padding per side

    bool has_bias() const noexcept { return !bias.empty(); }

    static Layer dense(Tensor w, Tensor b = {}) {
        Layer l;
        l.kind = LayerKind::dense;
        l.weight = std::move(w);
        l.bias = std::move(b);
        return l;
    }

    static Layer conv2d(Tensor w, Tensor b, std::size_t stride, std::size_t pad) {
        Layer l;
        l.kind = LayerKind::conv2d;
        l.weight = std::move(w);
        l.bias = std::move(b);
        l.stride = stride;
        l.pad = pad;
        return l;
    }

    static Layer of_kind(LayerKind k) {
        Layer l;
        l.kind = k;
        return l;
    }

    static Layer relu() { return of_kind(LayerKind::relu); }
    static Layer leaky_relu(double alpha) {
        Layer l = of_kind(LayerKind::leaky_relu);
        l.alpha = alpha;
        return l;
    }
    static Layer elu(double alpha) {
        Layer l = of_kind(LayerKind::elu);
        l.alpha = alpha;
        return l;
    }
    static Layer sigmoid() { return of_kind(LayerKind::sigmoid); }
    static Layer tanh() { return of_kind(LayerKind::tanh); }
    static Layer flatten() { return of_kind(LayerKind::flatten); }
    static Layer maxpool(std::size_t window) {
        Layer l = of_kind(LayerKind::maxpool);
        l.window = window;
        l.stride = window;
        return l;
    }
    static Layer avgpool(std::size_t window) {
        Layer l = of_kind(LayerKind::avgpool);
        l.window = window;
        l.stride = window;
        return l;
    }
};

namespace activation {

inline double relu(double z) { return z > 0.0 ? z : 0.0; }
inline double relu_deriv(double z) { return z > 0.0 ? 1.0 : 0.0; } // inactive branch at 0

inline double leaky_relu(double z, double a) { return z > 0.0 ? z : a * z; }
inline double leaky_relu_deriv(double z, double a) { return z > 0.0 ? 1.0 : a; }

inline double elu(double z, double a) { return z > 0.0 ? z : a * std::expm1(z); }
inline double elu_deriv(double z, double a) { return z > 0.0 ? 1.0 : a * std::exp(z); }

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}
inline double sigmoid_deriv(double z) {
    const double s = sigmoid(z);
    return s * (1.0 - s);
}

inline double tanh(double z) { return std::tanh(z); }
inline double tanh_deriv(double z) {
    const double t = std::tanh(z);
    return 1.0 - t * t;
}

inline double apply(LayerKind kind, double alpha, double z) {
    switch (kind) {
        case LayerKind::relu: return relu(z);
        case LayerKind::leaky_relu: return leaky_relu(z, alpha);
        case LayerKind::elu: return elu(z, alpha);
        case LayerKind::sigmoid: return sigmoid(z);
        case LayerKind::tanh: return tanh(z);
        default: throw InvalidArgument("not an activation layer");
    }
}

inline double deriv(LayerKind kind, double alpha, double z) {
    switch (kind) {
        case LayerKind::relu: return relu_deriv(z);
        case LayerKind::leaky_relu: return leaky_relu_deriv(z, alpha);
        case LayerKind::elu: return elu_deriv(z, alpha);
        case LayerKind::sigmoid: return sigmoid_deriv(z);
        case LayerKind::tanh: return tanh_deriv(z);
        default: throw InvalidArgument("not an activation layer");
    }
}

} // namespace activation

namespace detail {

inline std::size_t conv_extent(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad) {
    const std::size_t padded = in + 2 * pad;
    if (padded < k) throw InvalidArgument("conv2d: kernel larger than padded input");
    return (padded - k) / stride + 1;
}

} // namespace detail

// Output shape of a layer for a given input shape. Throws ValidationError
// naming the layer when the shapes do not compose.
inline Shape layer_output_shape(const Layer& layer, const Shape& in, std::size_t layer_index) {
    switch (layer.kind) {
        case LayerKind::dense: {
            if (layer.weight.rank() != 2)
                throw ValidationError(layer_index, "dense weight must be rank-2");
            if (in.size() != 1 || in[0] != layer.weight.cols())
                throw ValidationError(layer_index, "dense expects rank-1 input of length " +
                                                       std::to_string(layer.weight.cols()) +
                                                       ", got " + shape_str(in));
            return Shape{layer.weight.rows()};
        }
        case LayerKind::conv2d: {
            if (layer.weight.rank() != 4)
                throw ValidationError(layer_index, "conv2d weight must be rank-4 (oc,ic,kh,kw)");
            if (layer.stride < 1)
                throw ValidationError(layer_index, "conv2d stride must be >= 1");
            const Shape& w = layer.weight.shape();
            if (in.size() != 3 || in[0] != w[1])
                throw ValidationError(layer_index, "conv2d expects rank-3 input (c,h,w) with " +
                                                       std::to_string(w[1]) + " channels, got " +
                                                       shape_str(in));
            try {
                return Shape{w[0], detail::conv_extent(in[1], w[2], layer.stride, layer.pad),
                             detail::conv_extent(in[2], w[3], layer.stride, layer.pad)};
            } catch (const InvalidArgument& e) {
                throw ValidationError(layer_index, e.what());
            }
        }
        case LayerKind::flatten:
            return Shape{shape_size(in)};
        case LayerKind::maxpool:
        case LayerKind::avgpool: {
            if (layer.window < 1 || layer.window != layer.stride)
                throw ValidationError(layer_index, "pool window must be >= 1 and equal stride");
            if (in.size() != 3)
                throw ValidationError(layer_index, "pool expects rank-3 input (c,h,w), got " +
                                                       shape_str(in));
            if (in[1] % layer.window != 0 || in[2] % layer.window != 0)
                throw ValidationError(layer_index, "pool window must divide spatial extents " +
                                                       shape_str(in));
            return Shape{in[0], in[1] / layer.window, in[2] / layer.window};
        }
        default:
            return in; // elementwise activations
    }
}

namespace detail {

inline Tensor dense_forward(const Layer& layer, const Tensor& x) {
    const std::size_t out = layer.weight.rows(), in = layer.weight.cols();
    Tensor y(Shape{out});
    for (std::size_t r = 0; r < out; ++r) {
        double s = layer.has_bias() ? layer.bias[r] : 0.0;
        const double* row = layer.weight.data() + r * in;
        for (std::size_t c = 0; c < in; ++c) s += row[c] * x[c];
        y[r] = s;
    }
    return y;
}

// Gradient wrt input: W^T g.
inline Tensor dense_backward(const Layer& layer, const Tensor& g) {
    const std::size_t out = layer.weight.rows(), in = layer.weight.cols();
    Tensor gin(Shape{in});
    for (std::size_t r = 0; r < out; ++r) {
        const double* row = layer.weight.data() + r * in;
        const double gr = g[r];
        for (std::size_t c = 0; c < in; ++c) gin[c] += row[c] * gr;
    }
    return gin;
}

// Cross-correlation with zero padding; bias optional, excluded when
// with_bias is false (the linear-operator view used for norm bounds).
inline Tensor conv2d_forward(const Layer& layer, const Tensor& x, bool with_bias = true) {
    const Shape& w = layer.weight.shape();
    const std::size_t oc = w[0], ic = w[1], kh = w[2], kw = w[3];
    const std::size_t h = x.shape()[1], wd = x.shape()[2];
    const std::size_t s = layer.stride, p = layer.pad;
    const std::size_t oh = conv_extent(h, kh, s, p), ow = conv_extent(wd, kw, s, p);

    Tensor y(Shape{oc, oh, ow});
    for (std::size_t o = 0; o < oc; ++o) {
        const double b = (with_bias && layer.has_bias()) ? layer.bias[o] : 0.0;
        for (std::size_t i = 0; i < oh; ++i) {
            for (std::size_t j = 0; j < ow; ++j) {
                double acc = b;
                for (std::size_t c = 0; c < ic; ++c) {
                    for (std::size_t u = 0; u < kh; ++u) {
                        const long yy = static_cast<long>(i * s + u) - static_cast<long>(p);
                        if (yy < 0 || yy >= static_cast<long>(h)) continue;
                        for (std::size_t v = 0; v < kw; ++v) {
                            const long xx = static_cast<long>(j * s + v) - static_cast<long>(p);
                            if (xx < 0 || xx >= static_cast<long>(wd)) continue;
                            acc += layer.weight[((o * ic + c) * kh + u) * kw + v] *
                                   x[(c * h + static_cast<std::size_t>(yy)) * wd +
                                     static_cast<std::size_t>(xx)];
                        }
                    }
                }
                y[(o * oh + i) * ow + j] = acc;
            }
        }
    }
    return y;
}

// Adjoint of the (bias-free) convolution: scatter output gradients back
// through the kernel taps.
inline Tensor conv2d_backward(const Layer& layer, const Shape& in_shape, const Tensor& g) {
    const Shape& w = layer.weight.shape();
    const std::size_t oc = w[0], ic = w[1], kh = w[2], kw = w[3];
    const std::size_t h = in_shape[1], wd = in_shape[2];
    const std::size_t s = layer.stride, p = layer.pad;
    const std::size_t oh = g.shape()[1], ow = g.shape()[2];

    Tensor gin(in_shape);
    for (std::size_t o = 0; o < oc; ++o) {
        for (std::size_t i = 0; i < oh; ++i) {
            for (std::size_t j = 0; j < ow; ++j) {
                const double go = g[(o * oh + i) * ow + j];
                if (go == 0.0) continue;
                for (std::size_t c = 0; c < ic; ++c) {
                    for (std::size_t u = 0; u < kh; ++u) {
                        const long yy = static_cast<long>(i * s + u) - static_cast<long>(p);
                        if (yy < 0 || yy >= static_cast<long>(h)) continue;
                        for (std::size_t v = 0; v < kw; ++v) {
                            const long xx = static_cast<long>(j * s + v) - static_cast<long>(p);
                            if (xx < 0 || xx >= static_cast<long>(wd)) continue;
                            gin[(c * h + static_cast<std::size_t>(yy)) * wd +
                                static_cast<std::size_t>(xx)] +=
                                layer.weight[((o * ic + c) * kh + u) * kw + v] * go;
                        }
                    }
                }
            }
        }
    }
    return gin;
}

inline Tensor maxpool_forward(const Layer& layer, const Tensor& x) {
    const std::size_t c = x.shape()[0], h = x.shape()[1], wd = x.shape()[2];
    const std::size_t k = layer.window, oh = h / k, ow = wd / k;
    Tensor y(Shape{c, oh, ow});
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i < oh; ++i)
            for (std::size_t j = 0; j < ow; ++j) {
                double best = -HUGE_VAL;
                for (std::size_t u = 0; u < k; ++u)
                    for (std::size_t v = 0; v < k; ++v) {
                        const double val = x[(ch * h + i * k + u) * wd + j * k + v];
                        if (val > best) best = val;
                    }
                y[(ch * oh + i) * ow + j] = best;
            }
    return y;
}

// Ties route the gradient to the first maximal element in row-major order.
inline Tensor maxpool_backward(const Layer& layer, const Tensor& x, const Tensor& g) {
    const std::size_t c = x.shape()[0], h = x.shape()[1], wd = x.shape()[2];
    const std::size_t k = layer.window, oh = h / k, ow = wd / k;
    Tensor gin(x.shape());
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i < oh; ++i)
            for (std::size_t j = 0; j < ow; ++j) {
                double best = -HUGE_VAL;
                std::size_t best_idx = 0;
                for (std::size_t u = 0; u < k; ++u)
                    for (std::size_t v = 0; v < k; ++v) {
                        const std::size_t idx = (ch * h + i * k + u) * wd + j * k + v;
                        if (x[idx] > best) {
                            best = x[idx];
                            best_idx = idx;
                        }
                    }
                gin[best_idx] += g[(ch * oh + i) * ow + j];
            }
    return gin;
}

inline Tensor avgpool_forward(const Layer& layer, const Tensor& x) {
    const std::size_t c = x.shape()[0], h = x.shape()[1], wd = x.shape()[2];
    const std::size_t k = layer.window, oh = h / k, ow = wd / k;
    const double inv = 1.0 / static_cast<double>(k * k);
    Tensor y(Shape{c, oh, ow});
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i < oh; ++i)
            for (std::size_t j = 0; j < ow; ++j) {
                double s = 0.0;
                for (std::size_t u = 0; u < k; ++u)
                    for (std::size_t v = 0; v < k; ++v)
                        s += x[(ch * h + i * k + u) * wd + j * k + v];
                y[(ch * oh + i) * ow + j] = s * inv;
            }
    return y;
}

inline Tensor avgpool_backward(const Layer& layer, const Shape& in_shape, const Tensor& g) {
    const std::size_t c = in_shape[0], h = in_shape[1], wd = in_shape[2];
    const std::size_t k = layer.window, oh = h / k, ow = wd / k;
    const double inv = 1.0 / static_cast<double>(k * k);
    Tensor gin(in_shape);
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i < oh; ++i)
            for (std::size_t j = 0; j < ow; ++j) {
                const double share = g[(ch * oh + i) * ow + j] * inv;
                for (std::size_t u = 0; u < k; ++u)
                    for (std::size_t v = 0; v < k; ++v)
                        gin[(ch * h + i * k + u) * wd + j * k + v] += share;
            }
    return gin;
}

} // namespace detail

inline Tensor layer_forward(const Layer& layer, const Tensor& x) {
    switch (layer.kind) {
        case LayerKind::dense: return detail::dense_forward(layer, x);
        case LayerKind::conv2d: return detail::conv2d_forward(layer, x);
        case LayerKind::flatten: return x.flattened();
        case LayerKind::maxpool: return detail::maxpool_forward(layer, x);
        case LayerKind::avgpool: return detail::avgpool_forward(layer, x);
        default: {
            Tensor y(x.shape());
            for (std::size_t i = 0; i < x.size(); ++i)
                y[i] = activation::apply(layer.kind, layer.alpha, x[i]);
            return y;
        }
    }
}

// Gradient wrt the layer input, given the layer input seen at forward time
// and the gradient wrt the layer output.
inline Tensor layer_backward(const Layer& layer, const Tensor& input, const Tensor& grad_out) {
    switch (layer.kind) {
        case LayerKind::dense: return detail::dense_backward(layer, grad_out);
        case LayerKind::conv2d: return detail::conv2d_backward(layer, input.shape(), grad_out);
        case LayerKind::flatten: return grad_out.reshaped(input.shape());
        case LayerKind::maxpool: return detail::maxpool_backward(layer, input, grad_out);
        case LayerKind::avgpool: return detail::avgpool_backward(layer, input.shape(), grad_out);
        default: {
            Tensor gin(input.shape());
            for (std::size_t i = 0; i < input.size(); ++i)
                gin[i] = grad_out[i] * activation::deriv(layer.kind, layer.alpha, input[i]);
            return gin;
        }
    }
}

} // namespace netcond
