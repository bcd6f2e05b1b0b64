#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "netcond/conditioning.hpp"
#include "netcond/errors.hpp"
#include "netcond/network.hpp"
#include "netcond/norms.hpp"
#include "netcond/parallel.hpp"

namespace netcond {

// Uniform fixed-point grid: 2^bits levels spanning [range_lo, range_hi],
// rounding half to even. Models a fixed input number format shared by the
// whole corpus.
struct QuantSpec {
    int bits = 8;
    double range_lo = 0.0;
    double range_hi = 1.0;
};

inline double quant_step(const QuantSpec& spec) {
    if (spec.bits < 1) throw InvalidArgument("quantize: bits must be >= 1");
    if (spec.bits > 62) throw InvalidArgument("quantize: bits must be <= 62");
    if (!(spec.range_lo < spec.range_hi))
        throw InvalidArgument("quantize: range_lo must be < range_hi");
    const double levels_minus_one =
        static_cast<double>((std::uint64_t{1} << spec.bits) - 1);
    return (spec.range_hi - spec.range_lo) / levels_minus_one;
}

// Clamp to the range, then snap to the nearest level; exact halves resolve
// to the even level index (std::nearbyint under the default rounding mode).
inline Tensor quantize_input(const Tensor& x, const QuantSpec& spec) {
    const double step = quant_step(spec);
    const double max_index = static_cast<double>((std::uint64_t{1} << spec.bits) - 1);
    Tensor q(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = std::clamp(x[i], spec.range_lo, spec.range_hi);
        double k = std::nearbyint((v - spec.range_lo) / step);
        k = std::clamp(k, 0.0, max_index);
        q[i] = spec.range_lo + k * step;
    }
    return q;
}

// Smallest range covering every entry of the corpus.
inline QuantSpec derive_range(const std::vector<Tensor>& inputs, int bits) {
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (const Tensor& t : inputs)
        for (std::size_t i = 0; i < t.size(); ++i) {
            lo = std::min(lo, t[i]);
            hi = std::max(hi, t[i]);
        }
    if (!(lo < hi)) {
        // Constant corpus: widen so the grid is still valid.
        lo -= 0.5;
        hi += 0.5;
    }
    return QuantSpec{bits, lo, hi};
}

struct BitSweepInputRecord {
    std::size_t input_id = 0;
    double rel_input_error = 0.0;   // ||dx|| / ||x||
    double rel_output_error = 0.0;  // ||dy|| / ||y||
    double predicted = 0.0;         // kappa_tilde * rel_input_error
    bool kappa_bound_holds = true;  // rel_output_error <= predicted
    bool chain_bound_holds = true;  // ||dy|| <= product_bound * ||dx|| * (1 + 1e-9)
    bool misclassified = false;     // label changed by quantization
};

struct BitSweepRow {
    int bits = 0;
    double step = 0.0;
    double range_lo = 0.0, range_hi = 0.0;
    std::size_t inputs_used = 0;
    std::size_t skipped_degenerate = 0;
    std::size_t zero_perturbation = 0; // inputs landing exactly on grid points
    double mean_rel_input_error = 0.0, max_rel_input_error = 0.0;
    double mean_rel_output_error = 0.0, max_rel_output_error = 0.0;
    double max_abs_error = 0.0; // measured ||x_q - x||_inf over the corpus
    double misclassification_rate = 0.0;
    double kappa_tilde = 0.0;
    double predicted_output_error = 0.0; // kappa_tilde * mean_rel_input_error
    std::size_t kappa_bound_violations = 0;
    std::size_t chain_bound_violations = 0;
    std::vector<BitSweepInputRecord> records;
};

// Sweeps input bit-widths: quantization supplies the perturbation dx, and the
// observed relative output error is compared both against the sampled
// estimate kappa_tilde (statistical) and against the rigorous layer-norm
// product chain (hard bound).
inline std::vector<BitSweepRow> bit_sweep(const Network& net, const std::vector<Tensor>& inputs,
                                          const std::vector<int>& bits_list, double kappa_tilde,
                                          std::size_t workers = 1,
                                          double norm_tol = kDefaultNormTol,
                                          int norm_max_iter = kDefaultNormMaxIter) {
    if (bits_list.empty()) throw InvalidArgument("bit_sweep: empty bits list");
    const Bound product = product_bound(net, norm_tol, norm_max_iter);

    std::vector<BitSweepRow> rows;
    rows.reserve(bits_list.size());
    for (int bits : bits_list) {
        const QuantSpec spec = derive_range(inputs, bits);
        const double step = quant_step(spec);

        struct PerInput {
            bool degenerate = false;
            bool zero_dx = false;
            double abs_err = 0.0;
            BitSweepInputRecord rec;
        };
        const std::vector<PerInput> per_input = parallel_map<PerInput>(
            inputs.size(), workers, [&](std::size_t i) {
                PerInput out;
                out.rec.input_id = i;
                const Tensor& x = inputs[i];
                const Tensor xq = quantize_input(x, spec);
                for (std::size_t e = 0; e < x.size(); ++e)
                    out.abs_err = std::max(out.abs_err, std::abs(xq[e] - x[e]));

                const double norm_x = x.empty() ? 0.0 : l2_norm(x);
                if (norm_x <= 0.0) {
                    out.degenerate = true;
                    return out;
                }
                const Tensor y = forward(net, x);
                const double norm_y = l2_norm(y);
                if (norm_y == 0.0) {
                    out.degenerate = true;
                    return out;
                }
                const Tensor dx = xq - x;
                double norm_dx = 0.0;
                for (std::size_t e = 0; e < dx.size(); ++e) norm_dx += dx[e] * dx[e];
                norm_dx = std::sqrt(norm_dx);
                if (norm_dx == 0.0) {
                    out.zero_dx = true;
                    out.rec.kappa_bound_holds = true;
                    out.rec.chain_bound_holds = true;
                    return out;
                }

                const Tensor dy = forward(net, xq) - y;
                const double norm_dy = l2_norm(dy);
                out.rec.rel_input_error = norm_dx / norm_x;
                out.rec.rel_output_error = norm_dy / norm_y;
                out.rec.predicted = kappa_tilde * out.rec.rel_input_error;
                out.rec.kappa_bound_holds = out.rec.rel_output_error <= out.rec.predicted;
                out.rec.chain_bound_holds = norm_dy <= product.value * norm_dx * (1.0 + 1e-9);
                out.rec.misclassified = argmax(forward(net, xq)) != argmax(y);
                return out;
            });

        BitSweepRow row;
        row.bits = bits;
        row.step = step;
        row.range_lo = spec.range_lo;
        row.range_hi = spec.range_hi;
        row.kappa_tilde = kappa_tilde;
        double sum_in = 0.0, sum_out = 0.0;
        std::size_t misclassified = 0;
        for (const PerInput& pi : per_input) {
            row.max_abs_error = std::max(row.max_abs_error, pi.abs_err);
            if (pi.degenerate) {
                ++row.skipped_degenerate;
                continue;
            }
            ++row.inputs_used;
            if (pi.zero_dx) {
                ++row.zero_perturbation;
                row.records.push_back(pi.rec);
                continue;
            }
            row.records.push_back(pi.rec);
            sum_in += pi.rec.rel_input_error;
            sum_out += pi.rec.rel_output_error;
            row.max_rel_input_error = std::max(row.max_rel_input_error, pi.rec.rel_input_error);
            row.max_rel_output_error = std::max(row.max_rel_output_error, pi.rec.rel_output_error);
            if (!pi.rec.kappa_bound_holds) ++row.kappa_bound_violations;
            if (!pi.rec.chain_bound_holds) ++row.chain_bound_violations;
            if (pi.rec.misclassified) ++misclassified;
        }
        if (row.inputs_used > 0) {
            row.mean_rel_input_error = sum_in / static_cast<double>(row.inputs_used);
            row.mean_rel_output_error = sum_out / static_cast<double>(row.inputs_used);
            row.misclassification_rate =
                static_cast<double>(misclassified) / static_cast<double>(row.inputs_used);
        }
        row.predicted_output_error = kappa_tilde * row.mean_rel_input_error;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace netcond
