#pragma once

#include <string>

#include "json.hpp"
#include "polyiso/complex.hpp"
#include "polyiso/fold.hpp"
#include "polyiso/genpos.hpp"
#include "polyiso/pipeline.hpp"
#include "polyiso/plmap.hpp"
#include "polyiso/pullback.hpp"

namespace polyiso {

// Insertion-ordered documents keep emitted reports byte-stable.
using Json = nlohmann::ordered_json;

/// {"vertices": [...], "simplices": [[...]], "edge_lengths": {"a|b": len}}.
/// Emits maximal simplices only; the face closure is implied.
Json complex_to_json(const SimplicialComplex& k);
ComplexPtr complex_from_json(const Json& j, const std::string& context);
ComplexPtr load_complex(const std::string& path);

/// {"ambient_dim": N, "vertex_images": {"a": [x, y, ...]}}.
Json map_to_json(const PLMap& f);
PLMap map_from_json(const Json& j, const ComplexPtr& domain, const std::string& context);
PLMap load_map(const std::string& path, const ComplexPtr& domain);

Json validation_to_json(const SimplicialComplex& k, const ValidationReport& r);
Json shortness_to_json(const SimplicialComplex& k, const ShortnessReport& r);
Json genpos_to_json(const SimplicialComplex& k, const GenPosReport& r);
Json verdict_to_json(const SimplicialComplex& k, const EmbeddingVerdict& v);
Json fold_plan_to_json(const SimplicialComplex& k, const FoldPlan& plan);

Json defect_to_json(const DefectReport& r);
std::string defect_to_csv(const DefectReport& r);

Json convergence_to_json(const ConvergenceReport& r);
std::string convergence_to_csv(const ConvergenceReport& r);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace polyiso
