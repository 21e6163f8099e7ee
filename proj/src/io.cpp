#include "xprod/io.hpp"

#include <fstream>
#include <sstream>

namespace xprod {

namespace {

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Complex complex_from(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::MalformedInput, "complex values are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw Error(ErrorCode::MalformedInput, std::string("missing field '") + name + "'");
  return j.at(name);
}

template <typename T>
T get_as(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::MalformedInput, std::string("field '") + what + "' has the wrong type");
  }
}

}  // namespace

Json to_json(const SampledSystem& system) {
  Json points = Json::array();
  for (const auto& pt : system.points) points.push_back({{"id", pt.id}, {"coords", pt.coords}});
  Json edges = Json::array();
  for (auto [a, b] : system.edges) edges.push_back(Json::array({a, b}));
  return {{"period", system.period}, {"points", points}, {"edges", edges}, {"theta", system.theta}};
}

SampledSystem system_from_json(const Json& j) {
  SampledSystem s;
  s.period = get_as<int>(field(j, "period"), "period");
  for (const auto& pt : field(j, "points")) {
    Point p;
    p.id = get_as<PointId>(field(pt, "id"), "id");
    if (pt.contains("coords")) p.coords = get_as<std::vector<double>>(pt.at("coords"), "coords");
    s.points.push_back(std::move(p));
  }
  for (const auto& e : field(j, "edges")) {
    auto pair = get_as<std::vector<PointId>>(e, "edges");
    if (pair.size() != 2) throw Error(ErrorCode::MalformedInput, "edges are [a, b] pairs");
    s.edges.push_back({pair[0], pair[1]});
  }
  s.theta = get_as<std::vector<PointId>>(field(j, "theta"), "theta");
  return s;
}

Json to_json(const CrossedElement& a) {
  Json comps = Json::array();
  for (const auto& f : a.components()) {
    Json values = Json::array();
    for (auto v : f) values.push_back(complex_json(v));
    comps.push_back(values);
  }
  return {{"components", comps}};
}

CrossedElement element_from_json(SpacePtr space, const Json& j) {
  std::vector<ScalarField> comps;
  for (const auto& f : field(j, "components")) {
    ScalarField values;
    for (const auto& v : f) values.push_back(complex_from(v));
    comps.push_back(std::move(values));
  }
  return CrossedElement(std::move(space), std::move(comps));
}

Json to_json(const QuotientMap& map) {
  return {{"forward", map.forward}, {"preserves_edges", map.preserves_edges}, {"preserves_fixed", map.preserves_fixed}};
}

std::vector<ClassId> quotient_forward_from_json(const Json& j) {
  return get_as<std::vector<ClassId>>(field(j, "forward"), "forward");
}

Json to_json(const IsoCertificate& c) {
  Json tree = Json::array();
  for (auto [a, b] : c.tree_edges) tree.push_back(Json::array({a, b}));
  return {
      {"pass", c.pass},
      {"failures", c.failures},
      {"notes", c.notes},
      {"density_ok", c.density_ok},
      {"tolerances", {{"algebraic", c.tol.algebraic}, {"acceptance", c.tol.acceptance}}},
      {"trivialization",
       {{"ok", c.trivialization_ok},
        {"max_tree_defect", c.max_tree_defect},
        {"max_edge_defect", c.max_edge_defect},
        {"tolerance", c.trivialization_tol},
        {"holonomy_spread", c.holonomy_spread},
        {"roots", c.roots},
        {"tree_edges", tree}}},
      {"defects",
       {{"trials", c.defects.trials},
        {"homomorphism", c.defects.homomorphism},
        {"adjoint", c.defects.adjoint},
        {"injectivity_margin", c.defects.injectivity_margin},
        {"surjectivity_residual", c.defects.surjectivity_residual},
        {"diagonality", c.diagonality_defect},
        {"well_definedness", c.well_definedness_defect}}},
      {"frontier",
       {{"radius", c.frontier_radius},
        {"classes", c.frontier_classes},
        {"frame_coherence", c.frontier_frame_coherence},
        {"mating_defect", c.frontier_mating_defect},
        {"raw_variation", c.frontier_raw_variation},
        {"factor", c.frontier_factor}}},
      {"continuity", {{"image_jump", c.continuity_defect}, {"raw_variation", c.raw_variation}}},
  };
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedInput, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedInput, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MalformedInput, "cannot write '" + path + "'");
  out << text;
}

}  // namespace xprod
