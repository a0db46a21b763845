#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <string>

#include "polyiso/io.hpp"
#include "util.hpp"

using namespace polyiso;
using testutil::vec;

namespace {

std::string contains_or_empty(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos ? "" : e.what();
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("complex json round trip") {
  ComplexPtr k = testutil::right_triangle();
  const Json j = complex_to_json(*k);
  CHECK(j["vertices"].size() == 3);
  CHECK(j["simplices"].size() == 1);  // maximal simplices only
  CHECK(j["simplices"][0].size() == 3);
  CHECK(j["edge_lengths"].size() == 3);
  CHECK(j["edge_lengths"].contains("a|b"));

  ComplexPtr back = complex_from_json(j, "roundtrip");
  CHECK(back->vertex_ids() == k->vertex_ids());
  CHECK(back->maximal_simplices() == k->maximal_simplices());
  for (const auto& e : k->edges())
    CHECK(back->edge_length(e[0], e[1]) == k->edge_length(e[0], e[1]));
}

TEST_CASE("map json round trip is exact after dump and parse") {
  const PLMap f = testutil::contracted_square(1.0 / 3.0, 3);
  const Json j = map_to_json(f);
  CHECK(j["ambient_dim"] == 3);
  CHECK(j["vertex_images"].size() == 4);

  const Json reparsed = Json::parse(j.dump());
  const PLMap back = map_from_json(reparsed, f.domain(), "roundtrip");
  CHECK(back.ambient_dim() == 3);
  for (int v = 0; v < 4; ++v) CHECK((back.image(v) - f.image(v)).norm() == 0.0);
}

TEST_CASE("file loaders round trip through disk") {
  TempFile ck("io_tmp_complex.json");
  TempFile mk("io_tmp_map.json");
  ComplexPtr k = testutil::square_circle();
  const PLMap f = testutil::contracted_square(0.5, 2);
  write_text(ck.path, complex_to_json(*k).dump(2));
  write_text(mk.path, map_to_json(f).dump(2));

  ComplexPtr k2 = load_complex(ck.path);
  CHECK(k2->vertex_ids() == k->vertex_ids());
  const PLMap f2 = load_map(mk.path, k2);
  for (int v = 0; v < 4; ++v) CHECK((f2.image(v) - f.image(v)).norm() == 0.0);
}

TEST_CASE("parse errors carry the offending context") {
  Json bad = Json::object();
  bad["simplices"] = Json::array();
  bad["edge_lengths"] = Json::object();
  try {
    complex_from_json(bad, "test.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(contains_or_empty(e, "test.json") == "");
    CHECK(contains_or_empty(e, "vertices") == "");
  }

  Json badkey;
  badkey["vertices"] = Json::array({"a", "b"});
  badkey["simplices"] = Json::array({Json::array({"a", "b"})});
  badkey["edge_lengths"] = {{"ab", 1.0}};
  CHECK_THROWS_AS(complex_from_json(badkey, "x"), ParseError);

  ComplexPtr seg = testutil::segment();
  Json badmap;
  badmap["ambient_dim"] = 0;
  badmap["vertex_images"] = Json::object();
  CHECK_THROWS_AS(map_from_json(badmap, seg, "x"), ParseError);

  badmap["ambient_dim"] = 2;
  badmap["vertex_images"] = {{"a", Json::array({0.0, 0.0})},
                             {"z", Json::array({1.0, 0.0})}};
  try {
    map_from_json(badmap, seg, "m.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(contains_or_empty(e, "m.json") == "");
    CHECK(contains_or_empty(e, "z") == "");
  }

  badmap["vertex_images"] = {{"a", Json::array({0.0, 0.0})},
                             {"b", Json::array({1.0})}};
  CHECK_THROWS_AS(map_from_json(badmap, seg, "x"), ParseError);

  TempFile junk("io_tmp_junk.json");
  write_text(junk.path, "{not json");
  try {
    load_complex(junk.path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(contains_or_empty(e, junk.path) == "");
  }

  CHECK_THROWS_AS(read_text("io_tmp_no_such_file.json"), ParseError);
}

TEST_CASE("report serializers expose every field") {
  ComplexPtr k = testutil::right_triangle();

  const ValidationReport vr = validate_metric(*k);
  const Json vj = validation_to_json(*k, vr);
  CHECK(vj["valid"] == true);
  CHECK(vj["offenders"].empty());
  CHECK(vj["tolerance"].get<double>() > 0.0);

  const PLMap f = testutil::contracted_square(0.75, 2);
  const Json sj = shortness_to_json(*f.domain(), shortness_margin(f));
  CHECK(sj["strictly_short"] == true);
  CHECK(sj["short"] == true);
  CHECK(sj["margin"].get<double>() > 0.0);
  CHECK(sj["worst_simplex"].is_array());

  GenPosReport gr;
  gr.k = 2;
  gr.holds = false;
  gr.witness = {0, 2};
  const Json gj = genpos_to_json(*k, gr);
  CHECK(gj["holds"] == false);
  CHECK(gj["witness"] == Json::array({"a", "c"}));

  EmbeddingVerdict verdict;
  verdict.embedding = false;
  verdict.mode = VerifyMode::exact;
  verdict.witness_a = {0, 1};
  verdict.witness_b = {1, 2};
  verdict.detail = "overlap";
  const Json ej = verdict_to_json(*k, verdict);
  CHECK(ej["mode"] == "exact");
  CHECK(ej["witness_a"] == Json::array({"a", "b"}));
  CHECK(ej["detail"] == "overlap");
}

TEST_CASE("fold plan serialization") {
  ComplexPtr seg = testutil::segment();
  FoldPlan plan;
  EdgeFold fold;
  fold.edge = {0, 1};
  fold.pieces = 4;
  fold.target_length = 2.0;
  fold.straight_length = 1.0;
  fold.transverse = vec({0.0, 1.0});
  fold.offsets = {0.0, 0.25, 0.0, 0.25, 0.0};
  plan.edges.push_back(fold);

  const Json j = fold_plan_to_json(*seg, plan);
  REQUIRE(j["edges"].size() == 1);
  const Json& e = j["edges"][0];
  CHECK(e["edge"] == Json::array({"a", "b"}));
  CHECK(e["pieces"] == 4);
  CHECK(e["target_length"] == 2.0);
  CHECK(e["transverse"].size() == 2);
  CHECK(e["offsets"].size() == 5);
}

TEST_CASE("defect serialization as json and csv") {
  DefectReport r;
  r.max_defect = 0.25;
  r.argmax_a = 0;
  r.argmax_b = 3;
  r.rows.push_back({0, 3, 1.0, 0.75, 0.25});
  r.rows.push_back({1, 2, 0.5, 0.5, 0.0});

  const Json j = defect_to_json(r);
  CHECK(j["max_defect"] == 0.25);
  CHECK(j["argmax"] == Json::array({0, 3}));
  CHECK(j["rows"][0]["pair"] == "0|3");
  CHECK(j["rows"][1]["defect"] == 0.0);

  const std::string csv = defect_to_csv(r);
  CHECK(csv.rfind("pair,intrinsic,pullback,defect\n", 0) == 0);
  CHECK(csv.find("0|3,1,0.75,0.25\n") != std::string::npos);
}

TEST_CASE("convergence serialization as json and csv") {
  ConvergenceReport r;
  IterationRow row;
  row.iter = 1;
  row.sup_delta = 0.015625;
  row.min_gap = 0.5;
  row.defect = 0.0;
  row.alpha = 0.0;
  row.beta = 0.0078125;
  row.mu = 0.5;
  row.lambda = 0.999;
  row.alpha_schedule = {0.0, 0.0};
  row.beta_schedule = {0.0078125, 0.0078125};
  row.gap_by_set = {0.5};
  r.rows.push_back(row);
  r.shell_accuracy = {0.01, 0.002};
  r.shell_budget = {0.2, 0.1};
  r.violations = {};

  const Json j = convergence_to_json(r);
  CHECK(j["ledger_ok"] == true);
  CHECK(j["rows"].size() == 1);
  CHECK(j["rows"][0]["iter"] == 1);
  CHECK(j["rows"][0]["gap_by_set"] == Json::array({0.5}));
  CHECK(j["shell_budget"] == Json::array({0.2, 0.1}));

  const std::string csv = convergence_to_csv(r);
  CHECK(csv.rfind("iter,sup_delta,min_gap,defect,alpha,beta\n", 0) == 0);
  CHECK(csv.find("\n1,0.015625,0.5,0,0,0.0078125\n") != std::string::npos);
}

TEST_CASE("text io round trip") {
  TempFile t("io_tmp_text.txt");
  const std::string payload = "line one\nline two\n";
  write_text(t.path, payload);
  CHECK(read_text(t.path) == payload);
}
