#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "polyiso/genpos.hpp"
#include "polyiso/pipeline.hpp"
#include "util.hpp"

using namespace polyiso;
using testutil::vec;

namespace {

PLMap crossing_path() {
  ComplexPtr path = testutil::path4();
  std::vector<Vector> imgs{vec({0.0, 0.0, 0.0}), vec({0.9, 0.0, 0.0}),
                           vec({0.45, 0.3, 0.0}), vec({0.45, -0.3, 0.0})};
  return PLMap(path, 3, imgs);
}

PLMap two_segments() {
  auto k = SimplicialComplex::build(
      {"a", "b", "c", "d"}, {{"a", "b"}, {"c", "d"}},
      {{{"a", "b"}, 1.0}, {{"c", "d"}, 1.0}});
  std::vector<Vector> imgs{vec({0.0, 0.0, 0.0}), vec({0.7, 0.0, 0.0}),
                           vec({0.0, 3.0, 0.0}), vec({0.7, 3.0, 0.0})};
  return PLMap(k, 3, imgs);
}

}  // namespace

TEST_CASE("split_embed_pipeline on the contracted square") {
  const PLMap f = testutil::contracted_square(0.6, 3);
  const std::vector<double> schedule{0.2, 0.1};
  const SplitEmbedResult result = split_embed_pipeline(f, schedule, "a", 17);

  const auto lines = testutil::edge_polylines(result.map, result.correspondence);
  REQUIRE(lines.size() == 4);
  for (const auto& [e, line] : lines) {
    const double len =
        f.domain()->edge_length(e[0], e[1]);
    CHECK(std::abs(oracle::polyline_length(line) - len) <= 1e-9 * len);
  }

  CHECK(verify_embedding(result.map, VerifyMode::exact).embedding);

  const auto [prefix, residual] = split_coordinates(result.perturbed, 2);
  CHECK(is_general_position(prefix.images(), 2).holds);
  CHECK(shortness_margin(result.perturbed).short_map);

  CHECK(result.delta == doctest::Approx(0.5));
  CHECK(result.separation > 0.0);

  // The folded map never strays more than the sawtooth amplitude from the
  // perturbed map: min(eps_k, eps_{k+1})/2 <= 0.05 here.
  for (int v = 0; v < result.map.domain()->vertex_count(); ++v) {
    const Vector base = evaluate(result.perturbed, result.correspondence.anchors[v]);
    CHECK((result.map.image(v) - base).norm() <= 0.05 * (1.0 + 1e-9));
  }
}

TEST_CASE("split_embed_pipeline is deterministic in the seed") {
  const PLMap f = testutil::contracted_square(0.6, 3);
  const SplitEmbedResult r1 = split_embed_pipeline(f, {0.2, 0.1}, "a", 17);
  const SplitEmbedResult r2 = split_embed_pipeline(f, {0.2, 0.1}, "a", 17);
  REQUIRE(r1.map.domain()->vertex_count() == r2.map.domain()->vertex_count());
  for (int v = 0; v < r1.map.domain()->vertex_count(); ++v)
    CHECK((r1.map.image(v) - r2.map.image(v)).norm() == 0.0);
  for (int v = 0; v < 4; ++v)
    CHECK((r1.perturbed.image(v) - r2.perturbed.image(v)).norm() == 0.0);
}

TEST_CASE("split_embed_pipeline restores a single short segment") {
  ComplexPtr seg = testutil::segment();
  std::vector<Vector> imgs{vec({0.0, 0.0, 0.0}), vec({0.7, 0.0, 0.0})};
  const PLMap f(seg, 3, imgs);
  const SplitEmbedResult result = split_embed_pipeline(f, {0.2}, "a", 3);
  const auto lines = testutil::edge_polylines(result.map, result.correspondence);
  REQUIRE(lines.size() == 1);
  CHECK(oracle::polyline_length(lines.begin()->second) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(verify_embedding(result.map, VerifyMode::exact).embedding);
}

TEST_CASE("split_embed_pipeline rejects bad inputs") {
  const PLMap f = testutil::contracted_square(0.6, 3);
  CHECK_THROWS_AS(split_embed_pipeline(f, {}, "a", 1), PreconditionError);
  CHECK_THROWS_AS(split_embed_pipeline(f, {0.2, -0.1}, "a", 1), PreconditionError);
  CHECK_THROWS_AS(split_embed_pipeline(f, {0.2}, "nope", 1), PreconditionError);

  const PLMap planar = testutil::contracted_square(0.6, 2);
  CHECK_THROWS_AS(split_embed_pipeline(planar, {0.2}, "a", 1), PreconditionError);

  const PLMap stretched = testutil::contracted_square(1.2, 3);
  CHECK_THROWS_AS(split_embed_pipeline(stretched, {0.2}, "a", 1), PreconditionError);

  ComplexPtr tri = testutil::equilateral();
  std::vector<Vector> imgs(3, Vector::Zero(3));
  CHECK_THROWS_AS(split_embed_pipeline(PLMap(tri, 3, imgs), {0.2}, "a", 1),
                  PreconditionError);
}

TEST_CASE("iterate_nash with zero iterations returns the input untouched") {
  const PLMap f = testutil::contracted_square(0.8, 3);
  const IterateResult result = iterate_nash(f, {0.2, 0.1}, "a", 0, 9);
  CHECK(result.map.domain() == f.domain());
  for (int v = 0; v < 4; ++v) CHECK((result.map.image(v) - f.image(v)).norm() == 0.0);
  CHECK(result.report.rows.empty());
  CHECK(result.report.ledger_ok);
  CHECK(result.report.shell_budget == std::vector<double>{0.2, 0.1});
  REQUIRE(result.correspondence.anchors.size() == 4);
  for (int v = 0; v < 4; ++v) {
    CHECK(result.correspondence.anchors[v].simplex == Simplex{v});
    CHECK(result.correspondence.anchors[v].weights == std::vector<double>{1.0});
  }
}

TEST_CASE("iterate_nash rejects bad inputs") {
  const PLMap f = testutil::contracted_square(0.8, 3);
  CHECK_THROWS_AS(iterate_nash(f, {0.2}, "a", -1, 9), PreconditionError);
  CHECK_THROWS_AS(iterate_nash(f, {}, "a", 1, 9), PreconditionError);
  CHECK_THROWS_AS(iterate_nash(f, {0.2}, "nope", 1, 9), PreconditionError);

  const PLMap isometric = testutil::contracted_square(1.0, 3);
  CHECK_THROWS_AS(iterate_nash(isometric, {0.2}, "a", 1, 9), PreconditionError);

  const PLMap planar = testutil::contracted_square(0.8, 2);
  CHECK_THROWS_AS(iterate_nash(planar, {0.2}, "a", 1, 9), PreconditionError);

  const PLMap crossed = crossing_path();
  REQUIRE(shortness_margin(crossed).strictly_short);
  CHECK_THROWS_AS(iterate_nash(crossed, {0.2}, "a", 1, 9), PreconditionError);

  ComplexPtr tri = testutil::equilateral();
  std::vector<Vector> imgs{vec({0.0, 0.0, 0.0}), vec({0.5, 0.0, 0.0}),
                           vec({0.25, 0.4, 0.0})};
  CHECK_THROWS_AS(iterate_nash(PLMap(tri, 3, imgs), {0.2}, "a", 1, 9),
                  PreconditionError);
}

TEST_CASE("iterate_nash keeps its own ledger honest over two iterations") {
  const PLMap f = testutil::contracted_square(0.8, 3);
  const std::vector<double> schedule{0.2, 0.1};
  const IterateResult result = iterate_nash(f, schedule, "a", 2, 5);
  const ConvergenceReport& report = result.report;

  CHECK(report.ledger_ok);
  CHECK(report.violations.empty());
  REQUIRE(report.rows.size() == 2);

  const double eps_min = 0.1;
  for (size_t r = 0; r < report.rows.size(); ++r) {
    const IterationRow& row = report.rows[r];
    const int i = static_cast<int>(r) + 1;
    CHECK(row.iter == i);
    const double bound = eps_min / std::ldexp(1.0, 2 * i);
    CHECK(row.beta > 0.0);
    CHECK(row.beta < bound);
    if (i == 1)
      CHECK(row.alpha == 0.0);
    else {
      CHECK(row.alpha > 0.0);
      CHECK(row.alpha < bound);
    }
    CHECK(row.sup_delta <= row.alpha + row.beta + 1e-12);
    CHECK(row.defect <= 1e-9 * 4.0);
    CHECK(row.mu > 0.0);
    CHECK(row.min_gap > 0.0);
    CHECK(row.gap_by_set.size() == static_cast<size_t>(i));
    CHECK(row.alpha_schedule.size() == schedule.size());
    CHECK(row.beta_schedule.size() == schedule.size());
  }
  CHECK(report.rows[0].lambda > 0.0);
  CHECK(report.rows[0].lambda < 1.0);
  CHECK(report.rows[1].lambda == 0.0);

  // Separation formed at iteration 1 persists at better than half strength.
  CHECK(report.rows[1].gap_by_set[0] > 0.5 * report.rows[0].mu);

  REQUIRE(report.shell_accuracy.size() == 2);
  CHECK(report.shell_accuracy[0] < 0.2);
  CHECK(report.shell_accuracy[1] < 0.1);

  CHECK(verify_embedding(result.map, VerifyMode::exact).embedding);
  CHECK(result.correspondence.parent == f.domain());
  CHECK(static_cast<int>(result.correspondence.anchors.size()) ==
        result.map.domain()->vertex_count());

  const IterateResult again = iterate_nash(f, schedule, "a", 2, 5);
  REQUIRE(again.map.domain()->vertex_count() == result.map.domain()->vertex_count());
  for (int v = 0; v < result.map.domain()->vertex_count(); ++v)
    CHECK((again.map.image(v) - result.map.image(v)).norm() == 0.0);
  CHECK(again.report.rows[1].sup_delta == result.report.rows[1].sup_delta);
}

TEST_CASE("iterate_nash handles a two component domain") {
  const PLMap f = two_segments();
  REQUIRE(shortness_margin(f).strictly_short);
  const IterateResult result = iterate_nash(f, {0.2}, "a", 1, 2);
  CHECK(result.report.ledger_ok);
  CHECK(result.report.violations.empty());

  const auto lines = testutil::edge_polylines(result.map, result.correspondence);
  REQUIRE(lines.size() == 2);
  for (const auto& [e, line] : lines)
    CHECK(oracle::polyline_length(line) == doctest::Approx(1.0).epsilon(1e-9));
}
