#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netcond/base64.hpp"
#include "netcond/conditioning.hpp"
#include "netcond/errors.hpp"
#include "netcond/perturb.hpp"
#include "netcond/quantize.hpp"
#include "netcond/version.hpp"

namespace netcond {

using json = nlohmann::json;

// FNV-1a, 64-bit; used to fingerprint model files so a report cannot be
// matched to the wrong weights.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "' for digest");
    std::ostringstream ss;
    ss << in.rdbuf();
    return hex64(fnv1a64(ss.str()));
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// Common header of every report. The timestamp is the one field excluded
// from reproducibility comparisons.
struct ReportMeta {
    std::string command;
    std::uint64_t seed = 0;
    std::string model_digest;
};

inline json meta_to_json(const ReportMeta& meta) {
    json j;
    j["tool_version"] = kToolVersion;
    j["command"] = meta.command;
    j["timestamp"] = utc_timestamp();
    j["seed"] = meta.seed;
    j["model_digest"] = meta.model_digest;
    return j;
}

inline json to_json(const LayerBound& b) {
    return json{{"layer_index", b.layer_index},
                {"operator_norm", b.operator_norm},
                {"converged", b.converged}};
}

inline json to_json(const KappaRecord& r) {
    return json{{"input_id", r.input_id}, {"norm_x", r.norm_x},   {"norm_dx", r.norm_dx},
                {"norm_y", r.norm_y},     {"norm_dy", r.norm_dy}, {"kappa", r.kappa}};
}

inline json to_json(const PerturbationResult& r) {
    return json{{"input_id", r.input_id},
                {"norm_r", r.norm_r},
                {"norm_x", r.norm_x},
                {"original_class", r.original_class},
                {"perturbed_class", r.perturbed_class},
                {"iterations", r.iterations},
                {"success", r.success},
                {"r", {{"shape", r.r.shape()},
                       {"data", base64_encode(doubles_to_le_bytes(r.r.values()))}}}};
}

inline json to_json(const PrecisionStat& s) {
    return json{
        {"kappa", s.kappa}, {"minimum_digits", s.minimum_digits}, {"minimum_bits", s.minimum_bits}};
}

inline json to_json(const PrecisionReport& p) {
    return json{{"mean", to_json(p.mean)},
                {"max", to_json(p.max)},
                {"min", to_json(p.min)},
                {"sample_count", p.sample_count},
                {"machine_epsilon_used", p.machine_epsilon_used},
                {"expected_output_error", p.expected_output_error}};
}

inline json to_json(const BitSweepInputRecord& r) {
    return json{{"input_id", r.input_id},
                {"rel_input_error", r.rel_input_error},
                {"rel_output_error", r.rel_output_error},
                {"predicted", r.predicted},
                {"kappa_bound_holds", r.kappa_bound_holds},
                {"chain_bound_holds", r.chain_bound_holds},
                {"misclassified", r.misclassified}};
}

inline json to_json(const BitSweepRow& row) {
    json records = json::array();
    for (const BitSweepInputRecord& r : row.records) records.push_back(to_json(r));
    return json{{"bits", row.bits},
                {"step", row.step},
                {"range_lo", row.range_lo},
                {"range_hi", row.range_hi},
                {"inputs_used", row.inputs_used},
                {"skipped_degenerate", row.skipped_degenerate},
                {"zero_perturbation", row.zero_perturbation},
                {"mean_rel_input_error", row.mean_rel_input_error},
                {"max_rel_input_error", row.max_rel_input_error},
                {"mean_rel_output_error", row.mean_rel_output_error},
                {"max_rel_output_error", row.max_rel_output_error},
                {"max_abs_error", row.max_abs_error},
                {"misclassification_rate", row.misclassification_rate},
                {"kappa_tilde", row.kappa_tilde},
                {"predicted_output_error", row.predicted_output_error},
                {"kappa_bound_violations", row.kappa_bound_violations},
                {"chain_bound_violations", row.chain_bound_violations}};
}

// Flat table with one row per record; every number at 17 significant digits
// so binary64 values survive the text round trip.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline void write_table(const Table& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "\t" : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << row[i];
        out << "\n";
    }
    if (!out) throw InvalidArgument("failed writing table to '" + path + "'");
}

inline void write_structured(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw InvalidArgument("failed writing report to '" + path + "'");
}

// Sibling table path: report.json -> report.tsv, anything else gains .tsv.
inline std::string table_path_for(const std::string& structured_path) {
    const std::string suffix = ".json";
    if (structured_path.size() > suffix.size() &&
        structured_path.compare(structured_path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return structured_path.substr(0, structured_path.size() - suffix.size()) + ".tsv";
    return structured_path + ".tsv";
}

} // namespace netcond
