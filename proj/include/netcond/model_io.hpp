#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netcond/base64.hpp"
#include "netcond/errors.hpp"
#include "netcond/network.hpp"

namespace netcond {

// Model file: JSON with {format_version: 1, input_shape, layers: [...]}.
// Every parameter tensor is stored as {shape, data} with data holding the
// base64 of its little-endian binary64 values in row-major order, so that
// save -> load round-trips bit-exactly.

constexpr int kModelFormatVersion = 1;

namespace detail {

using json = nlohmann::json;

inline json tensor_to_json(const Tensor& t) {
    json j;
    j["shape"] = t.shape();
    j["data"] = base64_encode(doubles_to_le_bytes(t.values()));
    return j;
}

inline Tensor tensor_from_json(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains("shape") || !j.contains("data"))
        throw ParseError(field + ": tensor must be an object with 'shape' and 'data'");
    Shape shape;
    try {
        shape = j.at("shape").get<Shape>();
    } catch (const json::exception& e) {
        throw ParseError(field + ".shape: " + e.what());
    }
    std::vector<double> values = le_bytes_to_doubles(base64_decode(j.at("data").get<std::string>()));
    if (values.size() != shape_size(shape))
        throw ParseError(field + ": payload holds " + std::to_string(values.size()) +
                         " values but shape " + shape_str(shape) + " implies " +
                         std::to_string(shape_size(shape)));
    return Tensor(std::move(shape), std::move(values));
}

inline json layer_to_json(const Layer& l) {
    json j;
    j["kind"] = kind_name(l.kind);
    switch (l.kind) {
        case LayerKind::dense:
            j["weight"] = tensor_to_json(l.weight);
            if (l.has_bias()) j["bias"] = tensor_to_json(l.bias);
            break;
        case LayerKind::conv2d:
            j["weight"] = tensor_to_json(l.weight);
            if (l.has_bias()) j["bias"] = tensor_to_json(l.bias);
            j["stride"] = l.stride;
            j["pad"] = l.pad;
            break;
        case LayerKind::leaky_relu:
        case LayerKind::elu:
            j["alpha"] = l.alpha;
            break;
        case LayerKind::maxpool:
        case LayerKind::avgpool:
            j["window"] = l.window;
            j["stride"] = l.stride;
            break;
        default:
            break;
    }
    return j;
}

inline LayerKind kind_from_name(const std::string& name, std::size_t index) {
    for (LayerKind k : {LayerKind::dense, LayerKind::conv2d, LayerKind::relu,
                        LayerKind::leaky_relu, LayerKind::elu, LayerKind::sigmoid,
                        LayerKind::tanh, LayerKind::flatten, LayerKind::maxpool,
                        LayerKind::avgpool})
        if (name == kind_name(k)) return k;
    throw ParseError("layers[" + std::to_string(index) + "].kind: unknown layer kind '" + name +
                     "'");
}

inline Layer layer_from_json(const json& j, std::size_t index) {
    const std::string field = "layers[" + std::to_string(index) + "]";
    if (!j.is_object() || !j.contains("kind"))
        throw ParseError(field + ": layer must be an object with a 'kind'");
    Layer l;
    l.kind = kind_from_name(j.at("kind").get<std::string>(), index);
    try {
        switch (l.kind) {
            case LayerKind::dense:
            case LayerKind::conv2d:
                if (!j.contains("weight")) throw ParseError(field + ": missing 'weight'");
                l.weight = tensor_from_json(j.at("weight"), field + ".weight");
                if (j.contains("bias")) l.bias = tensor_from_json(j.at("bias"), field + ".bias");
                if (l.kind == LayerKind::conv2d) {
                    l.stride = j.value("stride", std::size_t{1});
                    l.pad = j.value("pad", std::size_t{0});
                }
                break;
            case LayerKind::leaky_relu:
            case LayerKind::elu:
                if (!j.contains("alpha")) throw ParseError(field + ": missing 'alpha'");
                l.alpha = j.at("alpha").get<double>();
                break;
            case LayerKind::maxpool:
            case LayerKind::avgpool:
                if (!j.contains("window")) throw ParseError(field + ": missing 'window'");
                l.window = j.at("window").get<std::size_t>();
                l.stride = j.value("stride", l.window);
                break;
            default:
                break;
        }
    } catch (const json::exception& e) {
        throw ParseError(field + ": " + e.what());
    }
    return l;
}

inline std::string offset_to_line_context(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace detail

inline std::string model_to_string(const Network& net) {
    detail::json j;
    j["format_version"] = kModelFormatVersion;
    j["input_shape"] = net.input_shape();
    detail::json layers = detail::json::array();
    for (const Layer& l : net.layers()) layers.push_back(detail::layer_to_json(l));
    j["layers"] = layers;
    return j.dump(2) + "\n";
}

inline Network model_from_string(const std::string& text) {
    detail::json j;
    try {
        j = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw ParseError("model parse error at " + detail::offset_to_line_context(text, e.byte) +
                         ": " + e.what());
    }
    if (!j.is_object()) throw ParseError("model root must be an object");
    const int version = j.value("format_version", -1);
    if (version != kModelFormatVersion)
        throw ParseError("format_version: expected " + std::to_string(kModelFormatVersion) +
                         ", got " + std::to_string(version));
    if (!j.contains("input_shape")) throw ParseError("missing 'input_shape'");
    if (!j.contains("layers") || !j.at("layers").is_array())
        throw ParseError("missing 'layers' array");

    Shape input_shape;
    try {
        input_shape = j.at("input_shape").get<Shape>();
    } catch (const detail::json::exception& e) {
        throw ParseError(std::string("input_shape: ") + e.what());
    }
    std::vector<Layer> layers;
    for (std::size_t i = 0; i < j.at("layers").size(); ++i)
        layers.push_back(detail::layer_from_json(j.at("layers")[i], i));

    // Network's constructor runs the structural validation and throws
    // ValidationError naming the failing layer.
    return Network(std::move(input_shape), std::move(layers));
}

inline void save_model(const Network& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
    out << model_to_string(net);
    if (!out) throw InvalidArgument("failed writing model to '" + path + "'");
}

inline Network load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_string(ss.str());
}

} // namespace netcond
