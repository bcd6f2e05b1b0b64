#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "netcond/errors.hpp"
#include "netcond/network.hpp"
#include "netcond/norms.hpp"
#include "netcond/parallel.hpp"

namespace netcond {

// Default epsilon for precision reports: binary32 unit roundoff, the usual
// reduced-precision inference target.
constexpr double kBinary32Epsilon = 0x1p-23;

// Amplification factor contributed by one layer. Weight layers carry their
// operator 2-norm; activations, flatten and the (non-overlapping) pools are
// 1-Lipschitz and contribute exactly 1.
struct LayerBound {
    std::size_t layer_index = 0;
    double operator_norm = 0.0;
    bool converged = true;
};

struct Bound {
    double value = 0.0;
    bool converged = true;
};

// Per-input condition number: the relative output change divided by the
// relative input change, together with the four norms that produced it.
struct KappaRecord {
    std::size_t input_id = 0;
    double norm_x = 0.0;
    double norm_dx = 0.0;
    double norm_y = 0.0;
    double norm_dy = 0.0;
    double kappa = 0.0;
};

struct PrecisionStat {
    double kappa = 0.0;
    double minimum_digits = 0.0; // log10(kappa)
    int minimum_bits = 0;        // ceil(log2(kappa)) + 1
};

struct PrecisionReport {
    PrecisionStat mean, max, min;
    std::size_t sample_count = 0;
    double machine_epsilon_used = kBinary32Epsilon;
    double expected_output_error = 0.0; // epsilon * max kappa
};

// The convolution layer viewed as the linear operator it is (bias excluded).
inline LinearMap conv_linear_map(const Layer& layer, const Shape& input_shape) {
    if (layer.kind != LayerKind::conv2d)
        throw InvalidArgument("conv_linear_map: layer is not conv2d");
    return LinearMap{
        [layer](const Tensor& x) { return detail::conv2d_forward(layer, x, false); },
        [layer, input_shape](const Tensor& g) {
            return detail::conv2d_backward(layer, input_shape, g);
        },
        input_shape};
}

inline std::vector<LayerBound> layer_bounds(const Network& net, double tol = kDefaultNormTol,
                                            int max_iter = kDefaultNormMaxIter) {
    std::vector<LayerBound> bounds;
    bounds.reserve(net.layer_count());
    Shape in_shape = net.input_shape();
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        const Layer& l = net.layers()[i];
        LayerBound b;
        b.layer_index = i;
        switch (l.kind) {
            case LayerKind::dense: {
                const NormEstimate est = spectral_norm(l.weight, tol, max_iter);
                b.operator_norm = est.value;
                b.converged = est.converged;
                break;
            }
            case LayerKind::conv2d: {
                const NormEstimate est =
                    operator_norm_of_map(conv_linear_map(l, in_shape), tol, max_iter);
                b.operator_norm = est.value;
                b.converged = est.converged;
                break;
            }
            default:
                b.operator_norm = 1.0;
                b.converged = true;
                break;
        }
        bounds.push_back(b);
        in_shape = net.output_shapes()[i];
    }
    return bounds;
}

// Product of all layer norms: the whole-network amplification bound for a
// single input perturbation.
inline Bound product_bound(const std::vector<LayerBound>& bounds) {
    Bound r{1.0, true};
    for (const LayerBound& b : bounds) {
        r.value *= b.operator_norm;
        r.converged = r.converged && b.converged;
    }
    return r;
}

// Sum over layers of the product of that layer's norm and every later norm
// (the suffix products, output side inward). Models one rounding injection
// per layer, each amplified by everything downstream; always >= the plain
// product since the deepest term is the full product.
inline Bound cumulative_bound(const std::vector<LayerBound>& bounds) {
    Bound r{0.0, true};
    double suffix = 1.0;
    for (std::size_t i = bounds.size(); i-- > 0;) {
        suffix *= bounds[i].operator_norm;
        r.value += suffix;
        r.converged = r.converged && bounds[i].converged;
    }
    return r;
}

inline Bound product_bound(const Network& net, double tol = kDefaultNormTol,
                           int max_iter = kDefaultNormMaxIter) {
    return product_bound(layer_bounds(net, tol, max_iter));
}

inline Bound cumulative_bound(const Network& net, double tol = kDefaultNormTol,
                              int max_iter = kDefaultNormMaxIter) {
    return cumulative_bound(layer_bounds(net, tol, max_iter));
}

// kappa = (||dy||/||y||) / (||dx||/||x||) with y, dy measured at the
// pre-softmax logits. ||y|| = 0 leaves the quantity undefined and throws;
// dy = 0 is a valid zero-kappa record.
inline KappaRecord kappa(const Network& net, const Tensor& x, const Tensor& dx,
                         std::size_t input_id = 0) {
    const double norm_x = l2_norm(x);
    const double norm_dx = l2_norm(dx);
    if (norm_x <= 0.0) throw InvalidArgument("kappa: ||x|| must be positive");
    if (norm_dx <= 0.0) throw InvalidArgument("kappa: ||dx|| must be positive");

    const Tensor y = forward(net, x);
    const double norm_y = l2_norm(y);
    if (norm_y == 0.0)
        throw DegenerateOutput("kappa: ||y|| = 0, condition number undefined at this input");

    const Tensor dy = forward(net, x + dx) - y;
    const double norm_dy = l2_norm(dy);

    KappaRecord rec;
    rec.input_id = input_id;
    rec.norm_x = norm_x;
    rec.norm_dx = norm_dx;
    rec.norm_y = norm_y;
    rec.norm_dy = norm_dy;
    rec.kappa = (norm_dy / norm_y) / (norm_dx / norm_x);
    return rec;
}

// Produces the perturbations to try for one input: (input_id, x, trials).
using PerturbationSource =
    std::function<std::vector<Tensor>(std::size_t, const Tensor&, std::size_t)>;

struct KappaMaxResult {
    std::vector<KappaRecord> per_input; // max-kappa record per surviving input
    KappaRecord global_max;
    std::size_t skipped_degenerate = 0;
};

// Estimator: the sampled maximum of kappa over inputs and perturbations.
// Degenerate inputs (zero input, zero output, vanished gradients) are skipped
// and counted rather than failing the batch.
inline KappaMaxResult kappa_max(const Network& net, const std::vector<Tensor>& inputs,
                                const PerturbationSource& source, std::size_t trials_per_input,
                                std::size_t workers = 1) {
    if (trials_per_input < 1) throw InvalidArgument("kappa_max: trials_per_input must be >= 1");

    const std::vector<std::optional<KappaRecord>> rows =
        parallel_map<std::optional<KappaRecord>>(
            inputs.size(), workers, [&](std::size_t i) -> std::optional<KappaRecord> {
                const Tensor& x = inputs[i];
                if (x.empty() || l2_norm(x) <= 0.0) return std::nullopt;
                std::vector<Tensor> perturbations;
                try {
                    perturbations = source(i, x, trials_per_input);
                } catch (const DegenerateOutput&) {
                    return std::nullopt;
                } catch (const DegenerateGradient&) {
                    return std::nullopt;
                }
                std::optional<KappaRecord> best;
                for (const Tensor& dx : perturbations) {
                    if (dx.empty() || l2_norm(dx) <= 0.0) continue;
                    try {
                        const KappaRecord rec = kappa(net, x, dx, i);
                        if (!best || rec.kappa > best->kappa) best = rec;
                    } catch (const DegenerateOutput&) {
                        return std::nullopt;
                    }
                }
                return best;
            });

    KappaMaxResult result;
    for (const auto& row : rows) {
        if (row)
            result.per_input.push_back(*row);
        else
            ++result.skipped_degenerate;
    }
    if (result.per_input.empty())
        throw EmptyResult("kappa_max: every input was degenerate or yielded no perturbation");
    result.global_max = result.per_input.front();
    for (const KappaRecord& rec : result.per_input)
        if (rec.kappa > result.global_max.kappa) result.global_max = rec;
    return result;
}

inline PrecisionStat precision_stat(double kappa_value) {
    PrecisionStat s;
    s.kappa = kappa_value;
    s.minimum_digits = std::log10(kappa_value);
    s.minimum_bits = static_cast<int>(std::ceil(std::log2(kappa_value))) + 1;
    return s;
}

// Minimum digits log10(kappa) and minimum bits ceil(log2(kappa)) + 1 for the
// mean, max and min of the sampled kappas; expected output error is
// epsilon * kappa_max.
inline PrecisionReport precision_report(const std::vector<double>& kappas,
                                        double epsilon = kBinary32Epsilon) {
    if (kappas.empty()) throw InvalidArgument("precision_report: empty kappa list");
    double sum = 0.0, lo = kappas.front(), hi = kappas.front();
    for (double k : kappas) {
        if (!(k > 0.0)) throw InvalidArgument("precision_report: kappa values must be positive");
        sum += k;
        lo = std::min(lo, k);
        hi = std::max(hi, k);
    }
    PrecisionReport report;
    report.mean = precision_stat(sum / static_cast<double>(kappas.size()));
    report.max = precision_stat(hi);
    report.min = precision_stat(lo);
    report.sample_count = kappas.size();
    report.machine_epsilon_used = epsilon;
    report.expected_output_error = epsilon * hi;
    return report;
}

} // namespace netcond
