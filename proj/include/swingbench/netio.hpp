#pragma once

#include <string>

#include "swingbench/network.hpp"

namespace swingbench {

/// Parse a network from JSON text. Two forms are accepted:
///   {"n": 3, "edges": [{"i":0,"j":1,"b":1.0}, ...],
///    "inertia": 1.0, "damping": 1.0, "kappa": 1.0}
/// and the preset shorthand
///   {"preset": {"kind": "complete", "n": 10, "weight": 1.0},
///    "inertia": 1.0, "damping": 1.0}
/// where kind is one of complete | path | cycle | star | erdos-renyi |
/// from-file ("weight" may also be {"min","max","seed"}; erdos-renyi takes
/// "p" and "seed"; from-file takes "path").
/// The result is validated and its connectivity checked eagerly.
/// Throws ParseError, ValidationError or DisconnectedGraph.
NetworkSpec<double> parse_network(const std::string& json_text);

/// parse_network applied to a file path, or directly to the argument when it
/// is inline JSON (starts with '{'), so presets can be given on a command
/// line without a file.
NetworkSpec<double> parse_network_file(const std::string& path_or_json);

/// Canonical JSON form: explicit edges normalized to i < j and sorted, fixed
/// key order. parse_network(emit_network(spec)) hashes identically.
std::string emit_network(const NetworkSpec<double>& spec);

/// FNV-1a 64-bit hash of the canonical form, as 16 hex digits.
std::string spec_hash(const NetworkSpec<double>& spec);

}  // namespace swingbench
