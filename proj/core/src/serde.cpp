#include "gradleak/serde.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gradleak/errors.hpp"

namespace gradleak {

namespace {

using json = nlohmann::ordered_json;

json parse_document(const std::string& text, const char* what) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError(std::string(what) + ": malformed JSON");
    return doc;
}

const json& require(const json& obj, const char* key, const char* what) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string(what) + ": missing key \"" + key + "\"");
    return *it;
}

std::size_t require_count(const json& obj, const char* key, const char* what) {
    const json& v = require(obj, key, what);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ParseError(std::string(what) + ": \"" + key + "\" must be a non-negative integer");
    return v.get<std::size_t>();
}

json tensor_to_json(const Tensor& t) {
    json out;
    out["shape"] = t.shape();
    json data = json::array();
    for (double v : t.data()) data.push_back(v);
    out["data"] = std::move(data);
    return out;
}

Tensor tensor_from_json(const json& obj, const char* what) {
    if (!obj.is_object()) throw ParseError(std::string(what) + ": tensor must be an object");
    const json& jshape = require(obj, "shape", what);
    const json& jdata = require(obj, "data", what);
    if (!jshape.is_array() || !jdata.is_array())
        throw ParseError(std::string(what) + ": tensor shape and data must be arrays");

    Shape shape;
    for (const auto& d : jshape) {
        if (!d.is_number_integer() || d.get<long long>() <= 0)
            throw ParseError(std::string(what) + ": tensor shape entries must be positive integers");
        shape.push_back(d.get<std::size_t>());
    }
    std::vector<double> data;
    data.reserve(jdata.size());
    for (const auto& v : jdata) {
        if (!v.is_number())
            throw ParseError(std::string(what) + ": tensor data entries must be numbers");
        data.push_back(v.get<double>());
    }
    try {
        return Tensor(std::move(shape), std::move(data));
    } catch (const ShapeError& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

json layers_to_json(const std::vector<LayerParams>& layers) {
    json out = json::array();
    for (const auto& slot : layers) {
        if (!slot.weights && !slot.bias) {
            out.push_back(nullptr);
            continue;
        }
        json entry;
        entry["weights"] = slot.weights ? tensor_to_json(*slot.weights) : json(nullptr);
        entry["bias"] = slot.bias ? tensor_to_json(*slot.bias) : json(nullptr);
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<LayerParams> layers_from_json(const json& arr, const char* what) {
    if (!arr.is_array()) throw ParseError(std::string(what) + ": \"layers\" must be an array");
    std::vector<LayerParams> layers;
    layers.reserve(arr.size());
    for (const auto& entry : arr) {
        LayerParams slot;
        if (!entry.is_null()) {
            if (!entry.is_object())
                throw ParseError(std::string(what) + ": layer entries must be objects or null");
            const json& w = require(entry, "weights", what);
            if (!w.is_null()) slot.weights = tensor_from_json(w, what);
            if (auto it = entry.find("bias"); it != entry.end() && !it->is_null())
                slot.bias = tensor_from_json(*it, what);
        }
        layers.push_back(std::move(slot));
    }
    return layers;
}

json arch_to_json(const ArchitectureSpec& arch) {
    json doc;
    doc["input"] = {{"channels", arch.in_channels},
                    {"height", arch.in_height},
                    {"width", arch.in_width}};
    json jlayers = json::array();
    for (const auto& layer : arch.layers) {
        json entry;
        entry["type"] = layer_type_name(layer);
        if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
            entry["filters"] = conv->geom.filters;
            entry["kernel"] = conv->geom.kernel;
            entry["stride"] = conv->geom.stride;
            entry["padding"] = conv->geom.padding;
            entry["bias"] = conv->has_bias;
        } else if (const auto* act = std::get_if<ActivationLayer>(&layer)) {
            entry["kind"] = activation_name(act->kind);
            entry["alpha"] = activation_needs_alpha(act->kind) ? json(act->alpha) : json(nullptr);
        } else if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
            entry["units"] = dense->units;
        }
        jlayers.push_back(std::move(entry));
    }
    doc["layers"] = std::move(jlayers);
    return doc;
}

}  // namespace

ArchitectureSpec parse_architecture(const std::string& text) {
    const char* what = "architecture";
    json doc = parse_document(text, what);
    if (!doc.is_object()) throw ParseError(std::string(what) + ": document must be an object");

    // Optional count fields (stride, padding) fall back to their defaults
    // when absent or null but are still type-checked when present.
    auto count_or = [what](const json& obj, const char* key, std::size_t dflt) {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return dflt;
        if (!it->is_number_integer() || it->get<long long>() < 0)
            throw ParseError(std::string(what) + ": \"" + key +
                             "\" must be a non-negative integer");
        return it->get<std::size_t>();
    };

    const json& input = require(doc, "input", what);
    ArchitectureSpec arch;
    arch.in_channels = require_count(input, "channels", what);
    arch.in_height = require_count(input, "height", what);
    arch.in_width = require_count(input, "width", what);

    const json& jlayers = require(doc, "layers", what);
    if (!jlayers.is_array()) throw ParseError(std::string(what) + ": \"layers\" must be an array");

    for (const auto& entry : jlayers) {
        if (!entry.is_object())
            throw ParseError(std::string(what) + ": layer entries must be objects");
        const json& jtype = require(entry, "type", what);
        if (!jtype.is_string())
            throw ParseError(std::string(what) + ": layer \"type\" must be a string");
        const std::string type = jtype.get<std::string>();

        if (type == "conv") {
            ConvLayer conv;
            conv.geom.filters = require_count(entry, "filters", what);
            conv.geom.kernel = require_count(entry, "kernel", what);
            conv.geom.stride = count_or(entry, "stride", 1);
            conv.geom.padding = count_or(entry, "padding", 0);
            if (auto it = entry.find("bias"); it != entry.end() && !it->is_null()) {
                if (!it->is_boolean())
                    throw ParseError(std::string(what) + ": conv \"bias\" must be a boolean");
                conv.has_bias = it->get<bool>();
            }
            arch.layers.emplace_back(conv);
        } else if (type == "activation") {
            ActivationLayer act;
            const json& jkind = require(entry, "kind", what);
            if (!jkind.is_string())
                throw ParseError(std::string(what) + ": activation \"kind\" must be a string");
            act.kind = activation_from_name(jkind.get<std::string>());
            if (auto it = entry.find("alpha"); it != entry.end() && !it->is_null()) {
                if (!it->is_number())
                    throw ParseError(std::string(what) + ": activation \"alpha\" must be a number");
                act.alpha = it->get<double>();
            }
            arch.layers.emplace_back(act);
        } else if (type == "flatten") {
            arch.layers.emplace_back(FlattenLayer{});
        } else if (type == "dense") {
            DenseLayer dense;
            dense.units = require_count(entry, "units", what);
            arch.layers.emplace_back(dense);
        } else {
            throw ParseError(std::string(what) + ": unknown layer type \"" + type + "\"");
        }
    }

    arch.resolve();
    return arch;
}

std::string serialize_architecture(const ArchitectureSpec& arch) {
    return arch_to_json(arch).dump(2) + "\n";
}

std::string arch_hash(const ArchitectureSpec& arch) {
    // FNV-1a 64 over the canonical serialization. Collision resistance is not
    // a goal; this only guards against accidentally mixed-up file triples.
    const std::string canon = serialize_architecture(arch);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 16);
}

std::string serialize_parameters(const ParameterSet& params) {
    json doc;
    doc["arch_hash"] = params.arch_hash;
    doc["layers"] = layers_to_json(params.layers);
    return doc.dump() + "\n";
}

ParameterSet parse_parameters(const std::string& text) {
    const char* what = "parameter set";
    json doc = parse_document(text, what);
    if (!doc.is_object()) throw ParseError(std::string(what) + ": document must be an object");
    ParameterSet params;
    const json& hash = require(doc, "arch_hash", what);
    if (!hash.is_string()) throw ParseError(std::string(what) + ": \"arch_hash\" must be a string");
    params.arch_hash = hash.get<std::string>();
    params.layers = layers_from_json(require(doc, "layers", what), what);
    return params;
}

std::string serialize_gradients(const GradientBundle& grads) {
    json doc;
    doc["arch_hash"] = grads.arch_hash;
    doc["seed"] = grads.seed;
    doc["loss"] = grads.loss;
    doc["layers"] = layers_to_json(grads.layers);
    return doc.dump() + "\n";
}

GradientBundle parse_gradients(const std::string& text) {
    const char* what = "gradient bundle";
    json doc = parse_document(text, what);
    if (!doc.is_object()) throw ParseError(std::string(what) + ": document must be an object");
    GradientBundle grads;
    const json& hash = require(doc, "arch_hash", what);
    if (!hash.is_string()) throw ParseError(std::string(what) + ": \"arch_hash\" must be a string");
    grads.arch_hash = hash.get<std::string>();
    if (auto it = doc.find("seed"); it != doc.end() && it->is_number_integer())
        grads.seed = it->get<std::uint64_t>();
    if (auto it = doc.find("loss"); it != doc.end() && it->is_number())
        grads.loss = it->get<double>();
    grads.layers = layers_from_json(require(doc, "layers", what), what);
    return grads;
}

std::string serialize_tensor(const Tensor& t) { return tensor_to_json(t).dump() + "\n"; }

Tensor parse_tensor(const std::string& text) {
    return tensor_from_json(parse_document(text, "tensor"), "tensor");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path);
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace gradleak
