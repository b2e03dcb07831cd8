#include "reticulate/network_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace reticulate {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + (path.empty() ? "" : ".") + key + ": missing field");
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path + ": expected a number");
    return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ParseError(path + ": expected an integer");
    return v.get<std::int64_t>();
}

int line_of_offset(const std::string& text, std::size_t offset) {
    int line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace

NetworkMedium parse_network(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("line {}: {}", line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), e.what()));
    }

    const std::int64_t n = integer(field(doc, "dimension", ""), "dimension");
    if (n < 1 || n > 16) throw ParseError("dimension: must be between 1 and 16");
    NetworkMedium medium{PeriodicNetwork(static_cast<int>(n)), Mode::Tangential};

    if (doc.contains("mode")) {
        const json& m = doc["mode"];
        if (!m.is_string()) throw ParseError("mode: expected a string");
        const auto s = m.get<std::string>();
        if (s == "isotropic") medium.mode = Mode::Isotropic;
        else if (s == "tangential") medium.mode = Mode::Tangential;
        else throw ParseError("mode: expected \"isotropic\" or \"tangential\"");
    }

    const json& nodes = field(doc, "nodes", "");
    if (!nodes.is_array()) throw ParseError("nodes: expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = fmt::format("nodes[{}]", i);
        const json& p = nodes[i];
        if (!p.is_array() || p.size() != static_cast<std::size_t>(n))
            throw ParseError(fmt::format("{}: expected {} coordinates", path, n));
        std::vector<double> coords;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double x = number(p[k], fmt::format("{}[{}]", path, k));
            if (!std::isfinite(x)) throw ParseError(fmt::format("{}[{}]: not finite", path, k));
            coords.push_back(x);
        }
        medium.network.add_node(TorusPoint(std::move(coords)));
    }

    const json& edges = field(doc, "edges", "");
    if (!edges.is_array()) throw ParseError("edges: expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string path = fmt::format("edges[{}]", i);
        const json& e = edges[i];
        const std::int64_t u = integer(field(e, "u", path), path + ".u");
        const std::int64_t v = integer(field(e, "v", path), path + ".v");
        if (u < 0 || u >= medium.network.node_count()) throw ParseError(path + ".u: node index out of range");
        if (v < 0 || v >= medium.network.node_count()) throw ParseError(path + ".v: node index out of range");
        const json& shift = field(e, "shift", path);
        if (!shift.is_array() || shift.size() != static_cast<std::size_t>(n))
            throw ParseError(fmt::format("{}.shift: expected {} integers", path, n));
        IntVec z;
        for (std::size_t k = 0; k < shift.size(); ++k) z.push_back(integer(shift[k], fmt::format("{}.shift[{}]", path, k)));
        double w = 1.0;
        if (e.contains("weight")) w = number(e["weight"], path + ".weight");
        try {
            medium.network.add_edge(static_cast<int>(u), static_cast<int>(v), std::move(z), w);
        } catch (const InvalidNetwork& err) {
            throw ParseError(path + ": " + err.what());
        }
    }
    return medium;
}

NetworkMedium read_network_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

std::string serialize_network(const NetworkMedium& medium) {
    const PeriodicNetwork& net = medium.network;
    std::string out = fmt::format("{{\n  \"dimension\": {},\n  \"mode\": \"{}\",\n  \"nodes\": [", net.dimension(),
                                  medium.mode == Mode::Isotropic ? "isotropic" : "tangential");
    for (int i = 0; i < net.node_count(); ++i) {
        out += i == 0 ? "\n    [" : ",\n    [";
        const auto& c = net.node(i).coords();
        for (std::size_t k = 0; k < c.size(); ++k) out += fmt::format("{}{:.17g}", k ? ", " : "", c[k]);
        out += "]";
    }
    out += net.node_count() ? "\n  ],\n  \"edges\": [" : "],\n  \"edges\": [";
    for (int e = 0; e < net.edge_count(); ++e) {
        const Edge& ed = net.edge(e);
        out += fmt::format("{}\n    {{\"u\": {}, \"v\": {}, \"shift\": [", e ? "," : "", ed.u, ed.v);
        for (std::size_t k = 0; k < ed.shift.size(); ++k) out += fmt::format("{}{}", k ? ", " : "", ed.shift[k]);
        out += fmt::format("], \"weight\": {:.17g}}}", ed.weight);
    }
    out += net.edge_count() ? "\n  ]\n}\n" : "]\n}\n";
    return out;
}

void write_network_file(const std::string& path, const NetworkMedium& medium) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << serialize_network(medium);
}

}  // namespace reticulate
