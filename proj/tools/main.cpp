#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polyiso/io.hpp"

namespace {

using namespace polyiso;

std::vector<double> parse_eps(const std::string& text) {
  if (text.empty()) throw ParseError("--eps: schedule must not be empty");
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("--eps: cannot parse entry \"" + item + "\"");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
}

struct Args {
  std::string complex_path, map_path, cmd, eps, base_vertex, out;
  std::uint64_t seed = 0;
  int level = 3;
  double chain_eps = -1.0;
  double rank_tol = 1e-9;
  int k = -1;
  int retries = 64;
  bool full = false;
  int iters = 1;
  bool emit_plan = false;
};

ComplexPtr need_complex(const Args& a) {
  if (a.complex_path.empty()) throw ParseError(a.cmd + ": requires --complex");
  return load_complex(a.complex_path);
}

PLMap need_map(const Args& a, const ComplexPtr& k) {
  if (a.map_path.empty()) throw ParseError(a.cmd + ": requires --map");
  return load_map(a.map_path, k);
}

std::vector<double> need_eps(const Args& a) {
  if (a.eps.empty()) throw ParseError(a.cmd + ": requires --eps");
  return parse_eps(a.eps);
}

VertexId base_or_least(const Args& a, const ComplexPtr& k) {
  if (!a.base_vertex.empty()) return a.base_vertex;
  if (k->vertex_count() == 0) throw PreconditionError("complex has no vertices");
  return k->vertex_id(0);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int run(const Args& a) {
  if (a.cmd == "validate") {
    const auto k = need_complex(a);
    emit(a.out, dump(validation_to_json(*k, validate_metric(*k))));
    return 0;
  }
  if (a.cmd == "margin") {
    const auto k = need_complex(a);
    const PLMap f = need_map(a, k);
    emit(a.out, dump(shortness_to_json(*k, shortness_margin(f))));
    return 0;
  }
  if (a.cmd == "genpos") {
    const auto k = need_complex(a);
    const PLMap f = need_map(a, k);
    const int order = a.k >= 0 ? a.k : 2 * k->dimension() + 1;
    GenPosOptions options;
    options.full = a.full;
    const auto report = is_general_position(f.images(), order, a.rank_tol, options);
    emit(a.out, dump(genpos_to_json(*k, report)));
    return 0;
  }
  if (a.cmd == "perturb") {
    const auto k = need_complex(a);
    const PLMap f = need_map(a, k);
    PerturbOptions options;
    options.rank_tolerance = a.rank_tol;
    options.retries = a.retries;
    const PLMap g =
        perturb_to_embedding(f, need_eps(a), base_or_least(a, k), a.seed, options);
    Json j;
    j["map"] = map_to_json(g);
    emit(a.out, dump(j));
    return 0;
  }
  if (a.cmd == "pullback") {
    const auto k = need_complex(a);
    const PLMap f = need_map(a, k);
    const SampleGraph graph = sample_graph(k, a.level);
    const double chain_eps = a.chain_eps > 0.0 ? a.chain_eps : graph.mesh;
    const DefectReport report = isometry_defect(f, graph, chain_eps);
    Json j;
    j["level"] = graph.level;
    j["mesh"] = graph.mesh;
    j["chain_eps"] = chain_eps;
    j["defect"] = defect_to_json(report);
    emit(a.out, dump(j));
    if (!a.out.empty()) write_text(a.out + ".csv", defect_to_csv(report));
    return 0;
  }
  if (a.cmd == "fold") {
    const auto k = need_complex(a);
    const PLMap f = need_map(a, k);
    const IsometrizeResult result = isometrize_graph(f, need_eps(a), base_or_least(a, k));
    Json j;
    j["complex"] = complex_to_json(*result.map.domain());
    j["map"] = map_to_json(result.map);
    if (a.emit_plan) j["plan"] = fold_plan_to_json(*k, result.plan);
    emit(a.out, dump(j));
    return 0;
  }
  if (a.cmd == "split-pipeline") {
    const auto k = need_complex(a);
    const PLMap f = need_map(a, k);
    const SplitEmbedResult result =
        split_embed_pipeline(f, need_eps(a), base_or_least(a, k), a.seed);
    Json j;
    j["complex"] = complex_to_json(*result.map.domain());
    j["map"] = map_to_json(result.map);
    j["perturbed"] = map_to_json(result.perturbed);
    j["separation"] = result.separation;
    j["delta"] = result.delta;
    if (a.emit_plan) j["plan"] = fold_plan_to_json(*k, result.plan);
    emit(a.out, dump(j));
    return 0;
  }
  if (a.cmd == "iterate") {
    const auto k = need_complex(a);
    const PLMap f = need_map(a, k);
    const IterateResult result =
        iterate_nash(f, need_eps(a), base_or_least(a, k), a.iters, a.seed);
    Json j;
    j["complex"] = complex_to_json(*result.map.domain());
    j["map"] = map_to_json(result.map);
    j["report"] = convergence_to_json(result.report);
    emit(a.out, dump(j));
    if (!a.out.empty()) write_text(a.out + ".csv", convergence_to_csv(result.report));
    if (!result.report.ledger_ok) {
      std::cerr << "ledger violations:\n";
      for (const auto& v : result.report.violations) std::cerr << "  " << v << "\n";
      return 3;
    }
    return 0;
  }
  throw ParseError("unknown command: " + a.cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric-complex embedding toolkit"};
  Args a;
  app.add_option("--complex", a.complex_path, "complex JSON file");
  app.add_option("--map", a.map_path, "map JSON file");
  app.add_option("--cmd", a.cmd, "command to run")
      ->required()
      ->check(CLI::IsMember({"validate", "margin", "genpos", "perturb", "pullback", "fold",
                             "split-pipeline", "iterate"}));
  app.add_option("--eps", a.eps, "per-shell accuracy schedule, comma separated");
  app.add_option("--base-vertex", a.base_vertex, "shell base vertex (default: least id)");
  app.add_option("--seed", a.seed, "random seed");
  app.add_option("--level", a.level, "subdivision level for sampling");
  app.add_option("--chain-eps", a.chain_eps, "chain step bound (default: graph mesh)");
  app.add_option("--rank-tol", a.rank_tol, "singular value ratio tolerance");
  app.add_option("--out", a.out, "output path (default: stdout)");
  app.add_option("--k", a.k, "general position order (default: 2n+1)");
  app.add_option("--retries", a.retries, "perturbation retry budget");
  app.add_option("--iters", a.iters, "iteration count for iterate");
  app.add_flag("--full", a.full, "force exhaustive subset enumeration");
  app.add_flag("--emit-plan", a.emit_plan, "include the fold plan in the output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return run(a);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
