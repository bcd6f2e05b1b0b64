#pragma once

#include <cstddef>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "netcond/errors.hpp"
#include "netcond/tensor.hpp"

namespace netcond {

enum class Split { train, test };

inline const char* split_name(Split s) { return s == Split::train ? "train" : "test"; }

// Labeled feature vectors with train/test tags. All features share one shape.
struct Dataset {
    std::vector<Tensor> features;
    std::vector<std::size_t> labels;
    std::vector<Split> split;
    std::size_t class_count = 0;

    std::size_t size() const noexcept { return features.size(); }

    std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }

    std::vector<std::size_t> indices_of(Split s) const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < split.size(); ++i)
            if (split[i] == s) idx.push_back(i);
        return idx;
    }
};

namespace detail {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

// Delimited text table: header row, one row per sample, features in %.17g
// (binary64 round-trippable), split tag, label in the final column.
inline void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
    const std::size_t d = ds.dim();
    for (std::size_t j = 0; j < d; ++j) out << "f" << j << ",";
    out << "split,label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) out << detail::format_g17(ds.features[i][j]) << ",";
        out << split_name(ds.split[i]) << "," << ds.labels[i] << "\n";
    }
    if (!out) throw InvalidArgument("failed writing dataset to '" + path + "'");
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open dataset file '" + path + "'");

    Dataset ds;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty dataset file");

    auto split_fields = [](const std::string& s) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ss(s);
        while (std::getline(ss, field, ',')) fields.push_back(field);
        return fields;
    };

    const std::vector<std::string> header = split_fields(line);
    if (header.size() < 3 || header[header.size() - 1] != "label" ||
        header[header.size() - 2] != "split")
        throw ParseError(path + ": header must end with 'split,label'");
    const std::size_t d = header.size() - 2;

    std::size_t line_no = 1;
    std::size_t max_label = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != d + 2)
            throw ParseError(path + " line " + std::to_string(line_no) + ": expected " +
                             std::to_string(d + 2) + " fields, got " +
                             std::to_string(fields.size()));
        Tensor x(Shape{d});
        for (std::size_t j = 0; j < d; ++j) {
            try {
                std::size_t pos = 0;
                x[j] = std::stod(fields[j], &pos);
                if (pos != fields[j].size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw ParseError(path + " line " + std::to_string(line_no) + ", field f" +
                                 std::to_string(j) + ": not a number: '" + fields[j] + "'");
            }
            if (!std::isfinite(x[j]))
                throw ParseError(path + " line " + std::to_string(line_no) + ", field f" +
                                 std::to_string(j) + ": non-finite value");
        }
        const std::string& tag = fields[d];
        if (tag == "train")
            ds.split.push_back(Split::train);
        else if (tag == "test")
            ds.split.push_back(Split::test);
        else
            throw ParseError(path + " line " + std::to_string(line_no) +
                             ", field split: expected 'train' or 'test', got '" + tag + "'");
        try {
            ds.labels.push_back(std::stoul(fields[d + 1]));
        } catch (const std::exception&) {
            throw ParseError(path + " line " + std::to_string(line_no) +
                             ", field label: not a nonnegative integer: '" + fields[d + 1] + "'");
        }
        max_label = std::max(max_label, ds.labels.back());
        ds.features.push_back(std::move(x));
    }
    if (ds.features.empty()) throw ParseError(path + ": no data rows");
    ds.class_count = max_label + 1;
    return ds;
}

} // namespace netcond
