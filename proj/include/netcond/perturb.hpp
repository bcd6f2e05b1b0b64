#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "netcond/errors.hpp"
#include "netcond/network.hpp"
#include "netcond/norms.hpp"
#include "netcond/rng.hpp"

namespace netcond {

constexpr double kDefaultOvershoot = 0.02;
constexpr int kDefaultDeepfoolMaxIter = 50;

// Outcome of one minimal-perturbation attack on one input.
struct PerturbationResult {
    std::size_t input_id = 0;
    Tensor r;                         // the perturbation added to x
    double norm_r = 0.0;
    double norm_x = 0.0;
    std::size_t original_class = 0;
    std::size_t perturbed_class = 0;
    int iterations = 0;
    bool success = false;             // perturbed_class != original_class
};

// Random direction scaled to the requested magnitude; the control arm against
// adversarial perturbations of the same size.
inline Tensor random_perturbation(const Tensor& x, double magnitude, Rng& rng) {
    if (!(magnitude > 0.0)) throw InvalidArgument("random_perturbation: magnitude must be > 0");
    Tensor r = random_unit_direction(x.shape(), rng);
    r *= magnitude;
    return r;
}

namespace detail {

inline Tensor clamp01(Tensor t) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::clamp(t[i], 0.0, 1.0);
    return t;
}

} // namespace detail

// Multiclass DeepFool: iteratively linearize the logit gaps, step to the
// nearest linearized decision boundary, and stop once the label flips. The
// accumulated step is scaled by (1 + overshoot) to cross the true boundary.
//
// When the input sits exactly on a boundary the linearized distance is zero;
// a minimal nudge along the boundary normal stands in so the iteration can
// cross instead of stalling.
inline PerturbationResult deepfool(const Network& net, const Tensor& x,
                                   double overshoot = kDefaultOvershoot,
                                   int max_iter = kDefaultDeepfoolMaxIter,
                                   bool clamp_to_unit_box = false, std::size_t input_id = 0) {
    if (overshoot < 0.0) throw InvalidArgument("deepfool: overshoot must be >= 0");
    if (max_iter < 1) throw InvalidArgument("deepfool: max_iter must be >= 1");
    const std::size_t classes = net.class_count();

    const std::size_t original = classify(net, x);
    const double norm_x = l2_norm(x);
    const double boundary_nudge = 1e-9 * (1.0 + norm_x);

    auto perturbed_point = [&](const Tensor& accumulated) {
        Tensor p = x + (1.0 + overshoot) * accumulated;
        return clamp_to_unit_box ? detail::clamp01(std::move(p)) : p;
    };

    Tensor r_total(x.shape());
    std::size_t current_class = original;
    int iterations = 0;

    while (iterations < max_iter) {
        const Tensor point = perturbed_point(r_total);
        const Tensor logits = forward(net, point);
        current_class = argmax(logits);
        if (current_class != original) break;

        const Tensor grad_orig = grad_logit(net, point, original);

        double best_dist = HUGE_VAL;
        Tensor best_w;
        double best_f = 0.0;
        bool any_candidate = false;
        for (std::size_t l = 0; l < classes; ++l) {
            if (l == original) continue;
            Tensor w = grad_logit(net, point, l) - grad_orig;
            const double wn = l2_norm(w);
            if (wn == 0.0) continue;
            any_candidate = true;
            const double f = logits[l] - logits[original];
            const double dist = std::abs(f) / wn;
            if (dist < best_dist) {
                best_dist = dist;
                best_w = std::move(w);
                best_f = f;
            }
        }
        if (!any_candidate)
            throw DegenerateGradient("deepfool: all candidate gradients vanish; "
                                     "classifier is flat at this point");

        const double wn2 = dot(best_w, best_w);
        double step = std::abs(best_f) / wn2; // |f|/||w||^2, the linearized distance
        if (step == 0.0) step = boundary_nudge / std::sqrt(wn2);
        r_total += step * best_w;
        ++iterations;
    }

    PerturbationResult res;
    res.input_id = input_id;
    res.norm_x = norm_x;
    res.original_class = original;
    res.iterations = iterations;
    res.r = perturbed_point(r_total) - x;
    res.norm_r = res.r.empty() ? 0.0 : l2_norm(res.r);
    res.perturbed_class = classify(net, x + res.r);
    res.success = res.perturbed_class != original;
    return res;
}

// Per-result log10(||x|| / ||r||): how many orders of magnitude smaller than
// the input the perturbation is.
struct MagnitudeProfile {
    std::vector<std::size_t> input_ids;
    std::vector<double> values;
    double min = 0.0, mean = 0.0, max = 0.0;
    std::size_t excluded_zero_norm = 0;
};

inline MagnitudeProfile magnitude_profile(const std::vector<PerturbationResult>& results) {
    MagnitudeProfile profile;
    double sum = 0.0;
    for (const PerturbationResult& res : results) {
        if (res.norm_r <= 0.0) {
            ++profile.excluded_zero_norm;
            continue;
        }
        const double v = std::log10(res.norm_x / res.norm_r);
        profile.input_ids.push_back(res.input_id);
        profile.values.push_back(v);
        sum += v;
    }
    if (!profile.values.empty()) {
        profile.min = *std::min_element(profile.values.begin(), profile.values.end());
        profile.max = *std::max_element(profile.values.begin(), profile.values.end());
        profile.mean = sum / static_cast<double>(profile.values.size());
    }
    return profile;
}

// --- Perturbation sources for kappa_max --------------------------------
//
// Each factory returns a callable (input_id, x, trials) -> perturbations.
// Randomness is derived from (seed, input_id, trial) so results do not
// depend on worker scheduling.

inline std::function<std::vector<Tensor>(std::size_t, const Tensor&, std::size_t)>
deepfool_source(const Network& net, double overshoot = kDefaultOvershoot,
                int max_iter = kDefaultDeepfoolMaxIter, bool clamp_to_unit_box = false) {
    return [&net, overshoot, max_iter, clamp_to_unit_box](
               std::size_t input_id, const Tensor& x, std::size_t) -> std::vector<Tensor> {
        PerturbationResult res = deepfool(net, x, overshoot, max_iter, clamp_to_unit_box, input_id);
        if (res.norm_r <= 0.0) return {};
        return {std::move(res.r)};
    };
}

// Random directions, each scaled to magnitude_of(input_id, x); pairing the
// magnitude with a per-input adversarial norm gives the matched comparison.
inline std::function<std::vector<Tensor>(std::size_t, const Tensor&, std::size_t)>
random_source(std::uint64_t seed, const std::function<double(std::size_t, const Tensor&)>& magnitude_of) {
    return [seed, magnitude_of](std::size_t input_id, const Tensor& x,
                                std::size_t trials) -> std::vector<Tensor> {
        const double magnitude = magnitude_of(input_id, x);
        if (!(magnitude > 0.0)) return {};
        std::vector<Tensor> out;
        out.reserve(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            Rng rng(derive_seed(seed, input_id * 0x10001ULL + t));
            out.push_back(random_perturbation(x, magnitude, rng));
        }
        return out;
    };
}

// Replays stored perturbations, one per input.
inline std::function<std::vector<Tensor>(std::size_t, const Tensor&, std::size_t)>
fixed_source(std::vector<Tensor> perturbations) {
    return [perturbations = std::move(perturbations)](
               std::size_t input_id, const Tensor&, std::size_t) -> std::vector<Tensor> {
        if (input_id >= perturbations.size() || perturbations[input_id].empty()) return {};
        return {perturbations[input_id]};
    };
}

} // namespace netcond
