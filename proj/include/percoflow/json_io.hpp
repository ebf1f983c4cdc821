#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "percoflow/capacity.hpp"
#include "percoflow/continuum.hpp"
#include "percoflow/errors.hpp"
#include "percoflow/geometry.hpp"
#include "percoflow/lattice.hpp"

namespace percoflow {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

namespace detail {

inline Vec parse_vec(const json& j, int dim = -1) {
  if (!j.is_array()) throw ConfigError("expected an array of numbers");
  Vec v;
  for (const auto& x : j) v.push_back(x.get<double>());
  if (dim >= 0 && static_cast<int>(v.size()) != dim)
    throw ConfigError("vector has wrong dimension");
  return v;
}

inline ConvexPolytope parse_polytope(const json& j, int dim) {
  if (!j.contains("halfspaces") || !j["halfspaces"].is_array())
    throw ConfigError("polytope needs a halfspaces array");
  std::vector<Halfspace> hs;
  for (const auto& h : j["halfspaces"])
    hs.push_back({parse_vec(h.at("normal"), dim), h.at("offset").get<double>()});
  return ConvexPolytope(std::move(hs));
}

inline std::vector<BoundaryPatch> parse_patches(const json& j, int dim) {
  std::vector<BoundaryPatch> out;
  for (const auto& p : j) {
    BoundaryPatch patch;
    patch.piece = p.at("piece").get<int>();
    patch.facet = p.at("halfspace").get<int>();
    if (p.contains("region")) patch.region = parse_polytope(p["region"], dim);
    out.push_back(std::move(patch));
  }
  return out;
}

}  // namespace detail

inline Domain parse_domain(const json& j) {
  try {
    int dim = j.at("dim").get<int>();
    std::vector<ConvexPolytope> pieces;
    for (const auto& p : j.at("pieces")) pieces.push_back(detail::parse_polytope(p, dim));
    auto g1 = detail::parse_patches(j.at("gamma1"), dim);
    auto g2 = detail::parse_patches(j.at("gamma2"), dim);
    return Domain(std::move(pieces), std::move(g1), std::move(g2));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
}

inline CapacityLaw parse_law(const json& j) {
  try {
    std::string type = j.at("type").get<std::string>();
    if (type == "constant") return CapacityLaw::constant(j.at("value").get<double>());
    if (type == "bernoulli")
      return CapacityLaw::bernoulli(j.at("p").get<double>(), j.at("hi").get<double>());
    if (type == "uniform")
      return CapacityLaw::uniform(j.at("a").get<double>(), j.at("b").get<double>());
    if (type == "exponential")
      return CapacityLaw::exponential(j.at("rate").get<double>());
    if (type == "discrete")
      return CapacityLaw::discrete_table(j.at("values").get<std::vector<double>>(),
                                         j.at("probs").get<std::vector<double>>());
    throw ConfigError("unknown capacity law type: " + type);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("law: ") + e.what());
  }
}

inline NuModel parse_nu_model(const json& j) {
  try {
    std::string type = j.at("type").get<std::string>();
    if (type == "constant") return NuModel::constant(j.at("value").get<double>());
    if (type == "l1scaled") return NuModel::l1_scaled(j.at("c").get<double>());
    if (type == "table") {
      std::vector<Vec> dirs;
      for (const auto& d : j.at("directions")) dirs.push_back(detail::parse_vec(d));
      return NuModel::table2d(dirs, j.at("values").get<std::vector<double>>());
    }
    throw ConfigError("unknown nu model type: " + type);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("nu model: ") + e.what());
  }
}

inline PolyhedralCut parse_cut(const json& j, int dim) {
  try {
    return PolyhedralCut{detail::parse_polytope(j, dim)};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("cut: ") + e.what());
  }
}

inline json lattice_to_json(const Lattice& lat, bool full) {
  json j;
  j["n"] = lat.mesh();
  j["dim"] = lat.dim();
  j["vertices"] = lat.vertex_count();
  j["edges"] = lat.edge_count();
  j["gamma_n"] = lat.gamma_n().size();
  j["gamma1_n"] = lat.gamma1_n().size();
  j["gamma2_n"] = lat.gamma2_n().size();
  j["connected"] = lat.is_connected();
  if (full) {
    json verts = json::array();
    for (uint32_t i = 0; i < lat.vertex_count(); ++i) {
      auto k = lat.vertex(i);
      verts.push_back(std::vector<int32_t>(k.begin(), k.end()));
    }
    j["vertex_coords"] = std::move(verts);
    json edges = json::array();
    for (const auto& e : lat.edges())
      edges.push_back({e.u, e.v});
    j["edge_list"] = std::move(edges);
    j["gamma1_list"] = lat.gamma1_n();
    j["gamma2_list"] = lat.gamma2_n();
  }
  return j;
}

}  // namespace percoflow
