#pragma once

#include <cfloat>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>

#include "netcond/errors.hpp"
#include "netcond/rng.hpp"
#include "netcond/tensor.hpp"

namespace netcond {

inline double l2_norm(const Tensor& t) {
    if (t.empty()) throw InvalidArgument("l2_norm: empty tensor");
    double sq = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) sq += t[i] * t[i];
    return std::sqrt(sq);
}

struct NormEstimate {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

constexpr double kDefaultNormTol = 1e-10;
constexpr int kDefaultNormMaxIter = 10000;

namespace detail {

// y = m x  (rank-2 m, flattened x of length cols).
inline Tensor mat_vec(const Tensor& m, const Tensor& x) {
    const std::size_t rows = m.rows(), cols = m.cols();
    Tensor y(Shape{rows});
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        const double* row = m.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
        y[r] = s;
    }
    return y;
}

// y = m^T x.
inline Tensor mat_vec_t(const Tensor& m, const Tensor& x) {
    const std::size_t rows = m.rows(), cols = m.cols();
    Tensor y(Shape{cols});
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m.data() + r * cols;
        const double xr = x[r];
        for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
    }
    return y;
}

inline Tensor normalized_ones(const Shape& shape) {
    Tensor v(shape, 1.0);
    v *= 1.0 / std::sqrt(static_cast<double>(v.size()));
    return v;
}

// Shared power-iteration loop on A^T A given the two half-applications.
// Tracks the Rayleigh quotient lambda = ||A v||^2 for unit v and stops when
// successive estimates agree to tol relative. A stall at exactly zero gets
// one deterministic random restart (seed 0) before concluding the operator
// is zero on the explored subspace.
inline NormEstimate power_iteration(const std::function<Tensor(const Tensor&)>& apply,
                                    const std::function<Tensor(const Tensor&)>& apply_adjoint,
                                    const Shape& input_shape, double tol, int max_iter) {
    if (tol <= 0.0) throw InvalidArgument("power_iteration: tol must be positive");
    if (max_iter < 1) throw InvalidArgument("power_iteration: max_iter must be >= 1");

    Tensor v = normalized_ones(input_shape);
    double lambda_prev = -1.0;
    bool restarted = false;
    for (int it = 1; it <= max_iter; ++it) {
        const Tensor u = apply(v);
        double lambda = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) lambda += u[i] * u[i];

        if (lambda == 0.0) {
            if (!restarted) {
                Rng restart_rng(0);
                v = random_unit_direction(input_shape, restart_rng);
                restarted = true;
                lambda_prev = -1.0;
                continue;
            }
            return NormEstimate{0.0, true, it};
        }

        if (lambda_prev >= 0.0 && std::abs(lambda - lambda_prev) < tol * lambda)
            return NormEstimate{std::sqrt(lambda), true, it};
        lambda_prev = lambda;

        Tensor w = apply_adjoint(u);
        const double wn = l2_norm(w);
        if (wn == 0.0) {
            // A^T A v vanished even though ||A v|| > 0; cannot iterate further.
            return NormEstimate{std::sqrt(lambda), false, it};
        }
        w *= 1.0 / wn;
        v = std::move(w);
    }
    return NormEstimate{lambda_prev > 0.0 ? std::sqrt(lambda_prev) : 0.0, false, max_iter};
}

} // namespace detail

// Largest singular value of a rank-2 tensor by power iteration on m^T m.
inline NormEstimate spectral_norm(const Tensor& m, double tol = kDefaultNormTol,
                                  int max_iter = kDefaultNormMaxIter) {
    if (m.rank() != 2) throw InvalidArgument("spectral_norm: tensor must be rank-2");
    return detail::power_iteration(
        [&m](const Tensor& x) { return detail::mat_vec(m, x); },
        [&m](const Tensor& x) { return detail::mat_vec_t(m, x); },
        Shape{m.cols()}, tol, max_iter);
}

// A linear operator given by matching forward/adjoint applications.
struct LinearMap {
    std::function<Tensor(const Tensor&)> apply;
    std::function<Tensor(const Tensor&)> apply_adjoint;
    Shape input_shape;
};

// Operator 2-norm of an arbitrary linear map. The pair is checked to be
// mutually adjoint on 3 random vector pairs before iterating; a mismatch
// means the caller wired the wrong transpose and is rejected outright.
inline NormEstimate operator_norm_of_map(const LinearMap& map, double tol = kDefaultNormTol,
                                         int max_iter = kDefaultNormMaxIter) {
    if (map.input_shape.empty()) throw InvalidArgument("operator_norm_of_map: empty input shape");
    Rng check_rng(0x6f706e6f726d); // fixed stream, deterministic check
    const Tensor probe = map.apply(Tensor(map.input_shape));
    const Shape output_shape = probe.shape();
    for (int i = 0; i < 3; ++i) {
        const Tensor v = gaussian_tensor(map.input_shape, check_rng);
        const Tensor w = gaussian_tensor(output_shape, check_rng);
        const double lhs = dot(map.apply(v), w);
        const double rhs = dot(v, map.apply_adjoint(w));
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (std::abs(lhs - rhs) > 1e-9 * scale)
            throw InvalidArgument("operator_norm_of_map: apply/apply_adjoint are not adjoint "
                                  "(<Av,w> != <v,A^T w>)");
    }
    return detail::power_iteration(map.apply, map.apply_adjoint, map.input_shape, tol, max_iter);
}

inline LinearMap dense_matrix_map(const Tensor& m) {
    if (m.rank() != 2) throw InvalidArgument("dense_matrix_map: tensor must be rank-2");
    return LinearMap{
        [m](const Tensor& x) { return detail::mat_vec(m, x); },
        [m](const Tensor& x) { return detail::mat_vec_t(m, x); },
        Shape{m.cols()}};
}

inline double frobenius_norm(const Tensor& t) {
    return l2_norm(t);
}

} // namespace netcond
