#include "polyiso/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace polyiso {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<VertexId> simplex_ids(const SimplicialComplex& k, const Simplex& s) {
  std::vector<VertexId> out;
  out.reserve(s.size());
  for (int v : s) out.push_back(k.vertex_id(v));
  return out;
}

const Json& require(const Json& j, const char* key, const std::string& context) {
  if (!j.is_object()) throw ParseError(context + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(context + ": missing \"" + key + "\"");
  return *it;
}

double require_number(const Json& j, const std::string& context) {
  if (!j.is_number()) throw ParseError(context + ": expected a number");
  return j.get<double>();
}

}  // namespace

Json complex_to_json(const SimplicialComplex& k) {
  Json j;
  j["vertices"] = Json::array();
  for (const auto& id : k.vertex_ids()) j["vertices"].push_back(id);
  j["simplices"] = Json::array();
  for (const auto& s : k.maximal_simplices()) j["simplices"].push_back(simplex_ids(k, s));
  Json lengths = Json::object();
  for (const auto& e : k.edges())
    lengths[k.vertex_id(e[0]) + "|" + k.vertex_id(e[1])] = k.edge_length(e[0], e[1]);
  j["edge_lengths"] = std::move(lengths);
  return j;
}

ComplexPtr complex_from_json(const Json& j, const std::string& context) {
  const Json& jv = require(j, "vertices", context);
  if (!jv.is_array()) throw ParseError(context + ": \"vertices\" must be an array");
  std::vector<VertexId> vertices;
  for (const auto& v : jv) {
    if (!v.is_string()) throw ParseError(context + ": vertex ids must be strings");
    vertices.push_back(v.get<std::string>());
  }

  const Json& js = require(j, "simplices", context);
  if (!js.is_array()) throw ParseError(context + ": \"simplices\" must be an array");
  std::vector<std::vector<VertexId>> simplices;
  for (const auto& s : js) {
    if (!s.is_array()) throw ParseError(context + ": each simplex must be an array");
    std::vector<VertexId> tuple;
    for (const auto& v : s) {
      if (!v.is_string())
        throw ParseError(context + ": simplex entries must be vertex id strings");
      tuple.push_back(v.get<std::string>());
    }
    simplices.push_back(std::move(tuple));
  }

  const Json& jl = require(j, "edge_lengths", context);
  if (!jl.is_object()) throw ParseError(context + ": \"edge_lengths\" must be an object");
  std::map<std::pair<VertexId, VertexId>, double> lengths;
  for (const auto& [key, value] : jl.items()) {
    const auto bar = key.find('|');
    if (bar == std::string::npos || key.find('|', bar + 1) != std::string::npos)
      throw ParseError(context + ": edge key \"" + key + "\" must be \"a|b\"");
    lengths[{key.substr(0, bar), key.substr(bar + 1)}] =
        require_number(value, context + ": edge_lengths[\"" + key + "\"]");
  }

  return SimplicialComplex::build(std::move(vertices), simplices, lengths);
}

ComplexPtr load_complex(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return complex_from_json(j, path);
}

Json map_to_json(const PLMap& f) {
  Json j;
  j["ambient_dim"] = f.ambient_dim();
  Json images = Json::object();
  const auto& k = *f.domain();
  for (int v = 0; v < k.vertex_count(); ++v) {
    Json coords = Json::array();
    for (int c = 0; c < f.ambient_dim(); ++c) coords.push_back(f.image(v)[c]);
    images[k.vertex_id(v)] = std::move(coords);
  }
  j["vertex_images"] = std::move(images);
  return j;
}

PLMap map_from_json(const Json& j, const ComplexPtr& domain, const std::string& context) {
  const Json& jd = require(j, "ambient_dim", context);
  if (!jd.is_number_integer() || jd.get<int>() < 1)
    throw ParseError(context + ": \"ambient_dim\" must be a positive integer");
  const int dim = jd.get<int>();

  const Json& ji = require(j, "vertex_images", context);
  if (!ji.is_object()) throw ParseError(context + ": \"vertex_images\" must be an object");
  for (const auto& [key, value] : ji.items()) {
    (void)value;
    if (!domain->has_vertex(key))
      throw ParseError(context + ": vertex_images references unknown vertex \"" + key + "\"");
  }

  std::vector<Vector> images(domain->vertex_count());
  for (int v = 0; v < domain->vertex_count(); ++v) {
    const VertexId id = domain->vertex_id(v);
    auto it = ji.find(id);
    if (it == ji.end())
      throw ParseError(context + ": vertex_images missing vertex \"" + id + "\"");
    if (!it->is_array() || static_cast<int>(it->size()) != dim)
      throw ParseError(context + ": image of \"" + id + "\" must be an array of " +
                       std::to_string(dim) + " numbers");
    Vector x(dim);
    for (int c = 0; c < dim; ++c)
      x[c] = require_number((*it)[c], context + ": image of \"" + id + "\"");
    images[v] = std::move(x);
  }
  return PLMap(domain, dim, std::move(images));
}

PLMap load_map(const std::string& path, const ComplexPtr& domain) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return map_from_json(j, domain, path);
}

Json validation_to_json(const SimplicialComplex& k, const ValidationReport& r) {
  Json j;
  j["valid"] = r.valid;
  j["tolerance"] = r.tolerance;
  j["offenders"] = Json::array();
  for (const auto& s : r.offenders) j["offenders"].push_back(simplex_ids(k, s));
  j["offender_eigenvalues"] = r.offender_eigenvalues;
  return j;
}

Json shortness_to_json(const SimplicialComplex& k, const ShortnessReport& r) {
  Json j;
  j["margin"] = r.margin;
  j["margin_ratio"] = r.margin_ratio;
  j["worst_simplex"] = simplex_ids(k, r.worst_simplex);
  j["strictly_short"] = r.strictly_short;
  j["short"] = r.short_map;
  return j;
}

Json genpos_to_json(const SimplicialComplex& k, const GenPosReport& r) {
  Json j;
  j["k"] = r.k;
  j["holds"] = r.holds;
  Json witness = Json::array();
  for (int v : r.witness) witness.push_back(k.vertex_id(v));
  j["witness"] = std::move(witness);
  j["min_singular_gap"] = r.min_singular_gap;
  return j;
}

Json verdict_to_json(const SimplicialComplex& k, const EmbeddingVerdict& v) {
  Json j;
  j["embedding"] = v.embedding;
  j["mode"] = v.mode == VerifyMode::genpos ? "genpos" : "exact";
  Json points = Json::array();
  for (int p : v.witness_points) points.push_back(k.vertex_id(p));
  j["witness_points"] = std::move(points);
  j["witness_a"] = simplex_ids(k, v.witness_a);
  j["witness_b"] = simplex_ids(k, v.witness_b);
  j["detail"] = v.detail;
  return j;
}

Json fold_plan_to_json(const SimplicialComplex& k, const FoldPlan& plan) {
  Json edges = Json::array();
  for (const auto& f : plan.edges) {
    Json e;
    e["edge"] = simplex_ids(k, f.edge);
    e["pieces"] = f.pieces;
    e["target_length"] = f.target_length;
    e["straight_length"] = f.straight_length;
    Json tr = Json::array();
    for (int c = 0; c < f.transverse.size(); ++c) tr.push_back(f.transverse[c]);
    e["transverse"] = std::move(tr);
    e["offsets"] = f.offsets;
    edges.push_back(std::move(e));
  }
  Json j;
  j["edges"] = std::move(edges);
  return j;
}

Json defect_to_json(const DefectReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x;
    x["pair"] = std::to_string(row.a) + "|" + std::to_string(row.b);
    x["intrinsic"] = row.intrinsic;
    x["pullback"] = row.pullback;
    x["defect"] = row.defect;
    rows.push_back(std::move(x));
  }
  Json j;
  j["max_defect"] = r.max_defect;
  j["argmax"] = Json::array({r.argmax_a, r.argmax_b});
  j["rows"] = std::move(rows);
  return j;
}

std::string defect_to_csv(const DefectReport& r) {
  std::ostringstream os;
  os << "pair,intrinsic,pullback,defect\n";
  for (const auto& row : r.rows)
    os << row.a << "|" << row.b << "," << fmt(row.intrinsic) << "," << fmt(row.pullback)
       << "," << fmt(row.defect) << "\n";
  return os.str();
}

Json convergence_to_json(const ConvergenceReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x;
    x["iter"] = row.iter;
    x["sup_delta"] = row.sup_delta;
    x["min_gap"] = row.min_gap;
    x["defect"] = row.defect;
    x["alpha"] = row.alpha;
    x["beta"] = row.beta;
    x["mu"] = row.mu;
    x["lambda"] = row.lambda;
    x["alpha_schedule"] = row.alpha_schedule;
    x["beta_schedule"] = row.beta_schedule;
    x["gap_by_set"] = row.gap_by_set;
    rows.push_back(std::move(x));
  }
  Json j;
  j["rows"] = std::move(rows);
  j["shell_accuracy"] = r.shell_accuracy;
  j["shell_budget"] = r.shell_budget;
  j["ledger_ok"] = r.ledger_ok;
  j["violations"] = r.violations;
  return j;
}

std::string convergence_to_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "iter,sup_delta,min_gap,defect,alpha,beta\n";
  for (const auto& row : r.rows)
    os << row.iter << "," << fmt(row.sup_delta) << "," << fmt(row.min_gap) << ","
       << fmt(row.defect) << "," << fmt(row.alpha) << "," << fmt(row.beta) << "\n";
  return os.str();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << text;
}

}  // namespace polyiso
