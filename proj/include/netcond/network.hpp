#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "netcond/errors.hpp"
#include "netcond/layer.hpp"
#include "netcond/tensor.hpp"

namespace netcond {

// Immutable feed-forward network evaluated to pre-softmax logits. There is
// deliberately no softmax layer: condition numbers are measured on the raw
// logits, and training applies softmax inside the loss only.
//
// Bias is supported even though the amplification bounds drop it: the bias
// term cancels in delta_y = f(theta(x+dx)+b) - f(theta x+b), so every bound
// stated on bias-free layers carries over unchanged.
class Network {
public:
    Network(Shape input_shape, std::vector<Layer> layers)
        : input_shape_(std::move(input_shape)), layers_(std::move(layers)) {
        validate();
    }

    const Shape& input_shape() const noexcept { return input_shape_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::size_t layer_count() const noexcept { return layers_.size(); }
    std::size_t class_count() const noexcept { return class_count_; }

    // Shape of each layer's output; index i corresponds to layers()[i].
    const std::vector<Shape>& output_shapes() const noexcept { return output_shapes_; }

private:
    void validate() {
        if (input_shape_.empty()) throw ValidationError("network input shape is empty");
        shape_size(input_shape_); // rejects zero extents
        if (layers_.empty()) throw ValidationError("network has no layers");

        Shape current = input_shape_;
        output_shapes_.clear();
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const Layer& l = layers_[i];
            switch (l.kind) {
                case LayerKind::dense:
                    if (l.weight.rank() != 2)
                        throw ValidationError(i, "dense weight must be rank-2 (out,in)");
                    if (l.has_bias() &&
                        l.bias.shape() != Shape{l.weight.rows()})
                        throw ValidationError(i, "dense bias shape must be (out)");
                    break;
                case LayerKind::conv2d:
                    if (l.weight.rank() != 4)
                        throw ValidationError(i, "conv2d weight must be rank-4 (oc,ic,kh,kw)");
                    if (l.stride < 1) throw ValidationError(i, "conv2d stride must be >= 1");
                    if (l.has_bias() && l.bias.shape() != Shape{l.weight.shape()[0]})
                        throw ValidationError(i, "conv2d bias shape must be (oc)");
                    break;
                case LayerKind::leaky_relu:
                case LayerKind::elu:
                    if (!(l.alpha > 0.0 && l.alpha <= 1.0))
                        throw ValidationError(i, std::string(kind_name(l.kind)) +
                                                     " alpha must satisfy 0 < alpha <= 1, got " +
                                                     std::to_string(l.alpha));
                    break;
                default:
                    break;
            }
            if (!l.weight.empty() && !l.weight.all_finite())
                throw ValidationError(i, "weight contains non-finite values");
            if (!l.bias.empty() && !l.bias.all_finite())
                throw ValidationError(i, "bias contains non-finite values");

            current = layer_output_shape(l, current, i);
            output_shapes_.push_back(current);
        }
        if (current.size() != 1)
            throw ValidationError(layers_.size() - 1,
                                  "final layer must produce rank-1 logits, got " +
                                      shape_str(current));
        class_count_ = current[0];
    }

    Shape input_shape_;
    std::vector<Layer> layers_;
    std::vector<Shape> output_shapes_;
    std::size_t class_count_ = 0;
};

namespace detail {

inline void require_input(const Network& net, const Tensor& x) {
    if (x.shape() != net.input_shape())
        throw InvalidArgument("input shape " + shape_str(x.shape()) +
                              " does not match network input " + shape_str(net.input_shape()));
    if (!x.all_finite()) throw InvalidArgument("input contains non-finite values");
}

} // namespace detail

// Inputs seen by each layer during one evaluation; layer_inputs[i] feeds
// layers()[i], output holds the logits.
struct ForwardTrace {
    std::vector<Tensor> layer_inputs;
    Tensor output;
};

inline ForwardTrace forward_trace(const Network& net, const Tensor& x) {
    detail::require_input(net, x);
    ForwardTrace trace;
    trace.layer_inputs.reserve(net.layer_count());
    Tensor current = x;
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        trace.layer_inputs.push_back(current);
        current = layer_forward(net.layers()[i], current);
        if (!current.all_finite())
            throw NumericOverflow(i, "non-finite value produced by layer " + std::to_string(i) +
                                         " (" + kind_name(net.layers()[i].kind) + ")");
    }
    trace.output = std::move(current);
    return trace;
}

// Pre-softmax logits.
inline Tensor forward(const Network& net, const Tensor& x) {
    detail::require_input(net, x);
    Tensor current = x;
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        current = layer_forward(net.layers()[i], current);
        if (!current.all_finite())
            throw NumericOverflow(i, "non-finite value produced by layer " + std::to_string(i) +
                                         " (" + kind_name(net.layers()[i].kind) + ")");
    }
    return current;
}

// Argmax of the logits; ties break to the lowest index.
inline std::size_t classify(const Network& net, const Tensor& x) {
    const Tensor logits = forward(net, x);
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i)
        if (logits[i] > logits[best]) best = i;
    return best;
}

inline std::size_t argmax(const Tensor& logits) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i)
        if (logits[i] > logits[best]) best = i;
    return best;
}

// Reverse-mode gradient of logit k wrt the input. Kink conventions: relu,
// leaky_relu and elu differentiate the z <= 0 branch at exactly zero, and
// maxpool routes to the first maximal element, so results are deterministic.
inline Tensor grad_logit(const Network& net, const Tensor& x, std::size_t k) {
    if (k >= net.class_count())
        throw InvalidArgument("grad_logit: class " + std::to_string(k) + " out of range, " +
                              std::to_string(net.class_count()) + " classes");
    const ForwardTrace trace = forward_trace(net, x);
    Tensor g(Shape{net.class_count()});
    g[k] = 1.0;
    for (std::size_t i = net.layer_count(); i-- > 0;)
        g = layer_backward(net.layers()[i], trace.layer_inputs[i], g);
    return g;
}

} // namespace netcond
