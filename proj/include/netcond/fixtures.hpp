#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "netcond/dataset.hpp"
#include "netcond/errors.hpp"
#include "netcond/network.hpp"
#include "netcond/rng.hpp"

namespace netcond {

// Cluster centers: vertices of a regular simplex scaled by 4, padded with
// zeros to the feature dimension. The closed form uses the Helmert basis of
// the hyperplane orthogonal to (1,...,1), so k centers need dim >= k-1.
inline std::vector<Tensor> blob_centers(std::size_t class_count, std::size_t dim) {
    if (class_count < 1) throw InvalidArgument("blob_centers: class_count must be >= 1");
    if (dim + 1 < class_count)
        throw InvalidArgument("blob_centers: dim must be >= class_count - 1, otherwise "
                              "centers collide");
    std::vector<Tensor> centers(class_count, Tensor(Shape{dim}));
    for (std::size_t i = 0; i < class_count; ++i)
        for (std::size_t j = 1; j < class_count; ++j) {
            const double denom = std::sqrt(static_cast<double>(j) * (static_cast<double>(j) + 1.0));
            double coord = 0.0;
            if (i < j)
                coord = 1.0 / denom;
            else if (i == j)
                coord = -static_cast<double>(j) / denom;
            centers[i][j - 1] = 4.0 * coord;
        }
    return centers;
}

// Gaussian clusters at the simplex centers; class-major order, reproducible
// by seed.
inline Dataset make_blobs(std::size_t n_per_class, std::size_t class_count, std::size_t dim,
                          double spread, std::uint64_t seed) {
    if (n_per_class < 1) throw InvalidArgument("make_blobs: n_per_class must be >= 1");
    if (dim < 1) throw InvalidArgument("make_blobs: dim must be >= 1");
    if (spread < 0.0) throw InvalidArgument("make_blobs: spread must be >= 0");
    const std::vector<Tensor> centers = blob_centers(class_count, dim);

    Dataset ds;
    ds.class_count = class_count;
    Rng rng(seed);
    for (std::size_t c = 0; c < class_count; ++c)
        for (std::size_t i = 0; i < n_per_class; ++i) {
            Tensor x = centers[c];
            for (std::size_t j = 0; j < dim; ++j) x[j] += spread * rng.normal();
            ds.features.push_back(std::move(x));
            ds.labels.push_back(c);
            ds.split.push_back(Split::train);
        }
    return ds;
}

// Two interleaved spirals in the plane, class 1 rotated by pi. n splits as
// evenly as possible (class 0 takes the extra point when n is odd).
inline Dataset make_two_spirals(std::size_t n, double noise, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("make_two_spirals: n must be >= 2");
    if (noise < 0.0) throw InvalidArgument("make_two_spirals: noise must be >= 0");
    const std::size_t counts[2] = {(n + 1) / 2, n / 2};
    const double t_min = 0.5, t_max = 3.0 * M_PI;

    Dataset ds;
    ds.class_count = 2;
    Rng rng(seed);
    for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t m = counts[c];
        for (std::size_t i = 0; i < m; ++i) {
            const double t =
                m == 1 ? t_min : t_min + (t_max - t_min) * static_cast<double>(i) /
                                             static_cast<double>(m - 1);
            const double angle = t + static_cast<double>(c) * M_PI;
            const double radius = t / M_PI;
            Tensor x = Tensor::vector({radius * std::cos(angle), radius * std::sin(angle)});
            x[0] += noise * rng.normal();
            x[1] += noise * rng.normal();
            ds.features.push_back(std::move(x));
            ds.labels.push_back(c);
            ds.split.push_back(Split::train);
        }
    }
    return ds;
}

// Stratified deterministic holdout: within each class, a seeded shuffle tags
// floor(fraction * count) samples as test.
inline void assign_split(Dataset& ds, double test_fraction, std::uint64_t seed) {
    if (test_fraction < 0.0 || test_fraction >= 1.0)
        throw InvalidArgument("assign_split: test_fraction must be in [0, 1)");
    Rng rng(seed);
    for (std::size_t c = 0; c < ds.class_count; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (ds.labels[i] == c) idx.push_back(i);
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.below(i)]);
        const std::size_t n_test =
            static_cast<std::size_t>(test_fraction * static_cast<double>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i)
            ds.split[idx[i]] = i < n_test ? Split::test : Split::train;
    }
}

inline double accuracy(const Network& net, const Dataset& ds,
                       const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw InvalidArgument("accuracy: no samples selected");
    std::size_t correct = 0;
    for (std::size_t i : indices)
        if (classify(net, ds.features[i]) == ds.labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(indices.size());
}

inline double accuracy(const Network& net, const Dataset& ds, Split split) {
    return accuracy(net, ds, ds.indices_of(split));
}

namespace detail {

inline void softmax_inplace(std::vector<double>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

} // namespace detail

// Mini-batch gradient descent on softmax cross-entropy over the train split.
// layer_widths lists every width including input dim and class count, with
// the given activation between consecutive dense layers (none after the
// last). Deterministic: seeded init, one seeded initial permutation, fixed
// batch order across epochs, single-threaded.
inline Network train_mlp(const std::vector<std::size_t>& layer_widths, const Layer& activation_layer,
                         const Dataset& ds, std::size_t epochs, double lr, std::uint64_t seed,
                         std::size_t batch_size = 32) {
    if (layer_widths.size() < 2) throw InvalidArgument("train_mlp: need at least two widths");
    if (!is_activation(activation_layer.kind))
        throw InvalidArgument("train_mlp: activation layer expected");
    if (layer_widths.front() != ds.dim())
        throw InvalidArgument("train_mlp: first width " + std::to_string(layer_widths.front()) +
                              " must equal dataset dim " + std::to_string(ds.dim()));
    if (layer_widths.back() != ds.class_count)
        throw InvalidArgument("train_mlp: last width " + std::to_string(layer_widths.back()) +
                              " must equal class count " + std::to_string(ds.class_count));
    if (batch_size < 1) throw InvalidArgument("train_mlp: batch_size must be >= 1");

    const std::size_t depth = layer_widths.size() - 1;
    Rng rng(seed);
    std::vector<Tensor> weights(depth), biases(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        const std::size_t fan_in = layer_widths[l], fan_out = layer_widths[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        weights[l] = Tensor(Shape{fan_out, fan_in});
        for (std::size_t i = 0; i < weights[l].size(); ++i)
            weights[l][i] = rng.uniform(-bound, bound);
        biases[l] = Tensor(Shape{fan_out});
        for (std::size_t i = 0; i < biases[l].size(); ++i)
            biases[l][i] = rng.uniform(-bound, bound);
    }

    std::vector<std::size_t> order = ds.indices_of(Split::train);
    if (order.empty()) throw InvalidArgument("train_mlp: dataset has no train rows");
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);

    const LayerKind act = activation_layer.kind;
    const double alpha = activation_layer.alpha;

    std::vector<Tensor> grad_w(depth), grad_b(depth);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(start + batch_size, order.size());
            for (std::size_t l = 0; l < depth; ++l) {
                grad_w[l] = Tensor(weights[l].shape());
                grad_b[l] = Tensor(biases[l].shape());
            }
            for (std::size_t s = start; s < end; ++s) {
                const std::size_t row = order[s];
                // Forward, keeping pre-activations and activations.
                std::vector<Tensor> acts{ds.features[row]};
                std::vector<Tensor> pre(depth);
                for (std::size_t l = 0; l < depth; ++l) {
                    const std::size_t out = layer_widths[l + 1], in = layer_widths[l];
                    Tensor z(Shape{out});
                    for (std::size_t r = 0; r < out; ++r) {
                        double acc = biases[l][r];
                        for (std::size_t c = 0; c < in; ++c)
                            acc += weights[l].at(r, c) * acts.back()[c];
                        z[r] = acc;
                    }
                    pre[l] = z;
                    if (l + 1 < depth) {
                        Tensor a(z.shape());
                        for (std::size_t i = 0; i < z.size(); ++i)
                            a[i] = activation::apply(act, alpha, z[i]);
                        acts.push_back(std::move(a));
                    } else {
                        acts.push_back(std::move(z)); // logits, softmax lives in the loss
                    }
                }

                std::vector<double> prob(acts.back().values());
                detail::softmax_inplace(prob);
                epoch_loss += -std::log(std::max(prob[ds.labels[row]], 1e-300));

                Tensor delta(Shape{layer_widths.back()});
                for (std::size_t i = 0; i < delta.size(); ++i)
                    delta[i] = prob[i] - (i == ds.labels[row] ? 1.0 : 0.0);

                for (std::size_t l = depth; l-- > 0;) {
                    const std::size_t out = layer_widths[l + 1], in = layer_widths[l];
                    for (std::size_t r = 0; r < out; ++r) {
                        grad_b[l][r] += delta[r];
                        for (std::size_t c = 0; c < in; ++c)
                            grad_w[l].at(r, c) += delta[r] * acts[l][c];
                    }
                    if (l == 0) break;
                    Tensor next(Shape{in});
                    for (std::size_t r = 0; r < out; ++r)
                        for (std::size_t c = 0; c < in; ++c)
                            next[c] += weights[l].at(r, c) * delta[r];
                    for (std::size_t c = 0; c < in; ++c)
                        next[c] *= activation::deriv(act, alpha, pre[l - 1][c]);
                    delta = std::move(next);
                }
            }
            const double scale = lr / static_cast<double>(end - start);
            for (std::size_t l = 0; l < depth; ++l) {
                for (std::size_t i = 0; i < weights[l].size(); ++i)
                    weights[l][i] -= scale * grad_w[l][i];
                for (std::size_t i = 0; i < biases[l].size(); ++i)
                    biases[l][i] -= scale * grad_b[l][i];
            }
        }
        if (!std::isfinite(epoch_loss))
            throw TrainingDiverged("train_mlp: loss became non-finite at epoch " +
                                   std::to_string(epoch) + "; try a lower lr");
    }

    std::vector<Layer> layers;
    for (std::size_t l = 0; l < depth; ++l) {
        layers.push_back(Layer::dense(weights[l], biases[l]));
        if (l + 1 < depth) {
            Layer a = activation_layer;
            layers.push_back(a);
        }
    }
    return Network(Shape{layer_widths.front()}, std::move(layers));
}

} // namespace netcond
