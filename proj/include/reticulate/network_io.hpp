#pragma once

// NetworkFile JSON:
//   {"dimension": n, "mode": "isotropic"|"tangential",
//    "nodes": [[x1,...,xn], ...],
//    "edges": [{"u": i, "v": j, "shift": [z1,...,zn], "weight": a}, ...]}

#include <string>

#include "reticulate/core.hpp"

namespace reticulate {

/// Throws ParseError located by line (syntax) or field path (schema), and
/// InvalidNetwork when the document describes an invalid network.
NetworkMedium parse_network(const std::string& text);
NetworkMedium read_network_file(const std::string& path);

/// Canonical form: stored order, 17 significant digits, one node or edge per line.
std::string serialize_network(const NetworkMedium& medium);
void write_network_file(const std::string& path, const NetworkMedium& medium);

}  // namespace reticulate
