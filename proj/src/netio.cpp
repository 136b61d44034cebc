#include "swingbench/netio.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "swingbench/errors.hpp"

namespace swingbench {

namespace {

using nlohmann::ordered_json;

double require_number(const ordered_json& obj, const char* key, const char* context) {
  if (!obj.contains(key)) {
    throw ParseError(std::string(context) + ": missing field \"" + key + "\"");
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw ParseError(std::string(context) + ": field \"" + key + "\" must be a number");
  }
  return v.get<double>();
}

Index require_integer(const ordered_json& obj, const char* key, const char* context) {
  if (!obj.contains(key)) {
    throw ParseError(std::string(context) + ": missing field \"" + key + "\"");
  }
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ParseError(std::string(context) + ": field \"" + key + "\" must be an integer");
  }
  return v.get<Index>();
}

std::vector<Edge<double>> parse_preset_edges(const ordered_json& preset);

NetworkSpec<double> from_json(const ordered_json& root) {
  if (!root.is_object()) throw ParseError("network: top level must be a JSON object");
  NetworkSpec<double> spec;
  spec.inertia = require_number(root, "inertia", "network");
  spec.damping = require_number(root, "damping", "network");
  spec.kappa = root.contains("kappa") ? require_number(root, "kappa", "network") : 1.0;

  if (root.contains("preset")) {
    const auto& preset = root.at("preset");
    if (!preset.is_object()) throw ParseError("preset: must be an object");
    spec.n = require_integer(preset, "n", "preset");
    spec.edges = parse_preset_edges(preset);
    return spec;
  }

  spec.n = require_integer(root, "n", "network");
  if (!root.contains("edges") || !root.at("edges").is_array()) {
    throw ParseError("network: missing \"edges\" array");
  }
  std::size_t idx = 0;
  for (const auto& e : root.at("edges")) {
    if (!e.is_object()) throw ParseError("edge " + std::to_string(idx) + ": must be an object");
    const std::string ctx = "edge " + std::to_string(idx);
    Edge<double> edge;
    edge.i = require_integer(e, "i", ctx.c_str());
    edge.j = require_integer(e, "j", ctx.c_str());
    edge.b = require_number(e, "b", ctx.c_str());
    spec.edges.push_back(edge);
    ++idx;
  }
  return spec;
}

std::vector<Edge<double>> parse_preset_edges(const ordered_json& preset) {
  if (!preset.contains("kind") || !preset.at("kind").is_string()) {
    throw ParseError("preset: missing string field \"kind\"");
  }
  const std::string kind = preset.at("kind").get<std::string>();

  if (kind == "from-file") {
    if (!preset.contains("path") || !preset.at("path").is_string()) {
      throw ParseError("preset: kind \"from-file\" needs a \"path\" string");
    }
    return parse_network_file(preset.at("path").get<std::string>()).edges;
  }

  GraphPreset<double> gp;
  gp.n = require_integer(preset, "n", "preset");
  if (kind == "complete") {
    gp.kind = PresetKind::Complete;
  } else if (kind == "path") {
    gp.kind = PresetKind::Path;
  } else if (kind == "cycle") {
    gp.kind = PresetKind::Cycle;
  } else if (kind == "star") {
    gp.kind = PresetKind::Star;
  } else if (kind == "erdos-renyi") {
    gp.kind = PresetKind::ErdosRenyi;
    gp.p = require_number(preset, "p", "preset");
    gp.seed = preset.contains("seed") ? preset.at("seed").get<std::uint64_t>() : 0;
  } else {
    throw ParseError("preset: unknown kind \"" + kind + "\"");
  }

  if (preset.contains("weight")) {
    const auto& w = preset.at("weight");
    if (w.is_number()) {
      gp.weight = w.get<double>();
    } else if (w.is_object()) {
      WeightRange<double> range;
      range.min = require_number(w, "min", "preset weight");
      range.max = require_number(w, "max", "preset weight");
      range.seed = w.contains("seed") ? w.at("seed").get<std::uint64_t>() : 0;
      gp.weight = range;
    } else {
      throw ParseError("preset: \"weight\" must be a number or {min, max, seed}");
    }
  }
  return preset_edges(gp);
}

/// Raw lambda_2 of the Laplacian, bypassing validation (used only to enrich
/// disconnected-graph messages).
double raw_lambda2(const NetworkSpec<double>& spec) {
  if (spec.n < 2) return 0.0;
  MatrixX<double> L = MatrixX<double>::Zero(spec.n, spec.n);
  for (const auto& e : spec.edges) {
    if (e.i < 0 || e.i >= spec.n || e.j < 0 || e.j >= spec.n || e.i == e.j) continue;
    L(e.i, e.i) += e.b;
    L(e.j, e.j) += e.b;
    L(e.i, e.j) -= e.b;
    L(e.j, e.i) -= e.b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixX<double>> solver(L);
  return solver.eigenvalues()(1);
}

}  // namespace

NetworkSpec<double> parse_network(const std::string& json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("network JSON: ") + e.what());
  }
  const NetworkSpec<double> spec = from_json(root);
  try {
    spec.validate();
    spectrum(spec);  // eager connectivity check (lambda_2)
  } catch (const DisconnectedGraph& e) {
    std::ostringstream msg;
    msg << e.what() << " (lambda_2 estimate " << raw_lambda2(spec) << ")";
    throw DisconnectedGraph(msg.str());
  }
  return spec;
}

NetworkSpec<double> parse_network_file(const std::string& path_or_json) {
  if (!path_or_json.empty() && path_or_json.front() == '{') {
    return parse_network(path_or_json);
  }
  std::ifstream in(path_or_json, std::ios::binary);
  if (!in) throw ParseError("cannot open network file: " + path_or_json);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str());
}

std::string emit_network(const NetworkSpec<double>& spec) {
  std::vector<Edge<double>> edges = spec.edges;
  for (auto& e : edges) {
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge<double>& a, const Edge<double>& b) {
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });

  ordered_json root;
  root["n"] = spec.n;
  ordered_json edge_array = ordered_json::array();
  for (const auto& e : edges) {
    ordered_json item;
    item["i"] = e.i;
    item["j"] = e.j;
    item["b"] = e.b;
    edge_array.push_back(item);
  }
  root["edges"] = edge_array;
  root["inertia"] = spec.inertia;
  root["damping"] = spec.damping;
  root["kappa"] = spec.kappa;
  return root.dump();
}

std::string spec_hash(const NetworkSpec<double>& spec) {
  const std::string canonical = emit_network(spec);
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace swingbench
