#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "polyiso/genpos.hpp"
#include "util.hpp"

using namespace polyiso;
using testutil::vec;

namespace {

// Two unit triangles glued along ab, with c and d mirrored across it.
ComplexPtr butterfly() {
  return SimplicialComplex::build(
      {"a", "b", "c", "d"}, {{"a", "b", "c"}, {"a", "b", "d"}},
      {{{"a", "b"}, 1.0},
       {{"a", "c"}, 1.0},
       {{"b", "c"}, 1.0},
       {{"a", "d"}, 1.0},
       {{"b", "d"}, 1.0}});
}

// Planar butterfly layout scaled by lambda, zero-padded, with the images of
// c and d deliberately collapsed onto each other.
PLMap pinched_butterfly(double lambda, int ambient) {
  ComplexPtr k = butterfly();
  const double h = std::sqrt(3.0) / 2.0;
  std::vector<Vector> images(4, Vector::Zero(ambient));
  auto set2 = [&](const VertexId& id, double x, double y) {
    images[k->vertex_index(id)][0] = lambda * x;
    images[k->vertex_index(id)][1] = lambda * y;
  };
  set2("a", 0.0, 0.0);
  set2("b", 1.0, 0.0);
  set2("c", 0.5, h);
  set2("d", 0.5, h);
  return PLMap(k, ambient, images);
}

}  // namespace

TEST_CASE("general position detection and witnesses") {
  const std::vector<Vector> tri{vec({0, 0}), vec({1, 0}), vec({0, 1})};
  const GenPosReport good = is_general_position(tri, 2);
  CHECK(good.holds);
  CHECK(good.witness.empty());
  CHECK(good.min_singular_gap > 1e-9);

  std::vector<Vector> spoiled = tri;
  spoiled.push_back(vec({2, 0}));
  const GenPosReport bad = is_general_position(spoiled, 2);
  CHECK_FALSE(bad.holds);
  CHECK(bad.witness == std::vector<int>{0, 1, 3});

  CHECK(is_general_position({vec({5, 5})}, 2).holds);
  CHECK(is_general_position({vec({0, 0}), vec({0, 0})}, 1).holds == false);
  CHECK_THROWS_AS(is_general_position(tri, 3), PreconditionError);
  CHECK_THROWS_AS(is_general_position(tri, -1), PreconditionError);
}

TEST_CASE("focused checks match full checks on incremental additions") {
  const std::vector<Vector> pts{vec({0, 0}), vec({1, 0}), vec({0.2, 0.9}),
                                vec({0.5, 0.5})};
  GenPosOptions focus;
  focus.focus = 3;
  const bool focused = is_general_position(pts, 2, 1e-9, focus).holds;
  GenPosOptions full;
  full.full = true;
  CHECK(focused == is_general_position(pts, 2, 1e-9, full).holds);
}

TEST_CASE("perturbation resolves deliberate image collisions") {
  const PLMap pinched = pinched_butterfly(0.5, 5);
  REQUIRE(shortness_margin(pinched).strictly_short);
  const int c = pinched.domain()->vertex_index("c");
  const int d = pinched.domain()->vertex_index("d");
  REQUIRE((pinched.image(c) - pinched.image(d)).norm() == 0.0);

  const std::vector<double> schedule{0.1, 0.05};
  const PLMap moved = perturb_to_embedding(pinched, schedule, "a", 7);

  CHECK(shortness_margin(moved).strictly_short);
  CHECK((moved.image(c) - moved.image(d)).norm() > 0.0);
  CHECK(is_general_position(moved.images(), 5).holds);

  // Displacements respect the shell budgets.
  const auto idx = shell_indices(*pinched.domain(), "a");
  for (int v = 0; v < 4; ++v) {
    const int level = idx.at({v});
    const double budget =
        std::min(schedule[0], schedule[std::min<size_t>(level, schedule.size()) - 1]);
    CHECK((moved.image(v) - pinched.image(v)).norm() < budget);
  }

  const auto verdict = verify_embedding(moved, VerifyMode::exact);
  CHECK(verdict.embedding);
  CHECK(verify_embedding(moved, VerifyMode::genpos).embedding);
}

TEST_CASE("perturbation leaves maps already in general position untouched") {
  const PLMap moved = perturb_to_embedding(pinched_butterfly(0.5, 5), {0.1}, "a", 3);
  const PLMap again = perturb_to_embedding(moved, {0.1}, "a", 99);
  for (int v = 0; v < 4; ++v) CHECK((again.image(v) - moved.image(v)).norm() == 0.0);
}

TEST_CASE("perturbation preconditions") {
  CHECK_THROWS_AS(perturb_to_embedding(pinched_butterfly(1.0, 5), {0.1}, "a", 1),
                  PreconditionError);
  CHECK_THROWS_AS(perturb_to_embedding(pinched_butterfly(0.5, 4), {0.1}, "a", 1),
                  PreconditionError);
  CHECK_THROWS_AS(perturb_to_embedding(pinched_butterfly(0.5, 5), {}, "a", 1),
                  PreconditionError);
  CHECK_THROWS_AS(perturb_to_embedding(pinched_butterfly(0.5, 5), {0.1}, "zz", 1),
                  PreconditionError);
}

TEST_CASE("prefix perturbation makes every coordinate prefix generic") {
  // All four butterfly vertices share their first coordinate after an
  // adversarial overwrite; the ambient dimension 6 = 3n admits the fix.
  const PLMap pinched = pinched_butterfly(0.5, 6);
  std::vector<Vector> flattened = pinched.images();
  for (auto& v : flattened) v[0] = 0.25;
  const PLMap bad = pinched.with_images(flattened);
  REQUIRE(shortness_margin(bad).strictly_short);

  const std::vector<double> schedule{0.2, 0.1};
  const PLMap fixed = perturb_prefix_general_position(bad, schedule, "a", 11);

  const int n = bad.domain()->dimension();
  const int ambient = bad.ambient_dim();
  for (int j = 1; j <= ambient; ++j) {
    std::vector<Vector> prefix;
    for (const auto& v : fixed.images()) prefix.emplace_back(v.head(j));
    GenPosOptions full;
    full.full = true;
    CHECK(is_general_position(prefix, std::min(j, 2 * n + 1), 1e-9, full).holds);
  }

  // First coordinates are distinct now.
  std::set<double> first;
  for (const auto& v : fixed.images()) first.insert(v[0]);
  CHECK(first.size() == 4);

  // Per-coordinate displacement stays under eps_l / (2N) on every shell.
  const auto idx = shell_indices(*bad.domain(), "a");
  for (int v = 0; v < 4; ++v) {
    const int level = idx.at({v});
    const double eps_l = schedule[std::min<size_t>(level, schedule.size()) - 1];
    const Vector delta = fixed.image(v) - bad.image(v);
    for (int i = 0; i < ambient; ++i)
      CHECK(std::abs(delta[i]) < eps_l / (2.0 * ambient));
  }

  CHECK(shortness_margin(fixed).short_map);
}

TEST_CASE("prefix perturbation requires three coordinates per dimension") {
  CHECK_THROWS_AS(perturb_prefix_general_position(pinched_butterfly(0.5, 5), {0.1}, "a", 1),
                  PreconditionError);
}

TEST_CASE("verify_embedding exact mode finds overlaps and genpos mode needs room") {
  ComplexPtr seg = testutil::segment();
  std::vector<Vector> collapsed{vec({1, 2, 3}), vec({1, 2, 3})};
  const PLMap bad(seg, 3, collapsed);
  const EmbeddingVerdict verdict = verify_embedding(bad, VerifyMode::exact);
  CHECK_FALSE(verdict.embedding);
  CHECK(verdict.mode == VerifyMode::exact);
  CHECK_FALSE(verdict.detail.empty());

  std::vector<Vector> fine{vec({0, 0, 0}), vec({1, 0, 0})};
  CHECK(verify_embedding(PLMap(seg, 3, fine), VerifyMode::exact).embedding);
  CHECK(verify_embedding(PLMap(seg, 3, fine), VerifyMode::genpos).embedding);

  std::vector<Vector> flat{vec({0, 0}), vec({1, 0})};
  CHECK_THROWS_AS(verify_embedding(PLMap(seg, 2, flat), VerifyMode::genpos),
                  PreconditionError);

  // A strictly short open path whose middle edge crosses the first.
  ComplexPtr path = testutil::path4();
  std::vector<Vector> imgs(4, Vector::Zero(3));
  imgs[path->vertex_index("a")] = vec({0.0, 0.0, 0.0});
  imgs[path->vertex_index("b")] = vec({0.9, 0.0, 0.0});
  imgs[path->vertex_index("c")] = vec({0.45, 0.3, 0.0});
  imgs[path->vertex_index("d")] = vec({0.45, -0.3, 0.0});
  const PLMap crossing(path, 3, imgs);
  REQUIRE(shortness_margin(crossing).strictly_short);
  CHECK_FALSE(verify_embedding(crossing, VerifyMode::exact).embedding);
}
