#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "percoflow/continuum.hpp"

using namespace percoflow;

namespace {

Domain unit_square_domain(int split = 1) {
  std::vector<ConvexPolytope> pieces;
  if (split == 1) {
    pieces.push_back(ConvexPolytope::box({0.0, 0.0}, {1.0, 1.0}));
  } else if (split == 2) {
    pieces.push_back(ConvexPolytope::box({0.0, 0.0}, {1.0, 0.37}));
    pieces.push_back(ConvexPolytope::box({0.0, 0.37}, {1.0, 1.0}));
  } else {
    pieces.push_back(ConvexPolytope::box({0.0, 0.0}, {0.5, 0.61}));
    pieces.push_back(ConvexPolytope::box({0.5, 0.0}, {1.0, 0.61}));
    pieces.push_back(ConvexPolytope::box({0.0, 0.61}, {0.5, 1.0}));
    pieces.push_back(ConvexPolytope::box({0.5, 0.61}, {1.0, 1.0}));
  }
  // gamma1: left side of the first column of pieces, gamma2: right side
  std::vector<BoundaryPatch> g1, g2;
  for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
    auto iv = *pieces[i].axis_intervals();
    if (iv[0].first == 0.0) g1.push_back({i, 1, std::nullopt});
    if (iv[0].second == 1.0) g2.push_back({i, 0, std::nullopt});
  }
  return Domain(std::move(pieces), std::move(g1), std::move(g2));
}

Domain lshape_domain(bool split = false) {
  std::vector<ConvexPolytope> pieces;
  pieces.push_back(ConvexPolytope::box({0.0, 0.0}, {1.0, 1.0}));
  if (!split) {
    pieces.push_back(ConvexPolytope::box({1.0, 0.0}, {2.0, 0.5}));
  } else {
    pieces.push_back(ConvexPolytope::box({1.0, 0.0}, {1.5, 0.5}));
    pieces.push_back(ConvexPolytope::box({1.5, 0.0}, {2.0, 0.5}));
  }
  std::vector<BoundaryPatch> g2 = {{static_cast<int>(pieces.size()) - 1, 0, std::nullopt}};
  return Domain(std::move(pieces), {{0, 1, std::nullopt}}, std::move(g2));
}

PolyhedralCut halfplane(double nx, double ny, double off) {
  Vec n = normalized(Vec{nx, ny});
  return PolyhedralCut{ConvexPolytope({{n, off}})};
}

}  // namespace

TEST_CASE("nu models evaluate as expected") {
  auto c = NuModel::constant(2.5);
  CHECK(c({1.0, 0.0}) == 2.5);
  CHECK(c.nu_min() == 2.5);
  CHECK(c.nu_max() == 2.5);

  auto l1 = NuModel::l1_scaled(1.0);
  CHECK(l1({1.0, 0.0}) == Catch::Approx(1.0));
  double s = 1.0 / std::sqrt(2.0);
  CHECK(l1({s, s}) == Catch::Approx(std::sqrt(2.0)));
  CHECK(l1.nu_min() == Catch::Approx(1.0));
  CHECK(l1.nu_max(2) == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("nu table folds and symmetrizes the directions") {
  std::vector<Vec> dirs;
  std::vector<double> vals = {1.0, 2.0, 3.0, 2.5, 1.5};
  for (double th : {0.0, M_PI / 8, M_PI / 4, 3 * M_PI / 8, M_PI / 2})
    dirs.push_back({std::cos(th), std::sin(th)});
  auto nu = NuModel::table2d(dirs, vals);
  // 0 and pi/2 fold together, pi/8 and 3pi/8 fold together
  CHECK(nu({1.0, 0.0}) == Catch::Approx(1.25));
  CHECK(nu({0.0, 1.0}) == Catch::Approx(1.25));
  CHECK(nu({0.0, -1.0}) == Catch::Approx(1.25));
  double a = nu({std::cos(M_PI / 8), std::sin(M_PI / 8)});
  double b = nu({std::cos(3 * M_PI / 8), std::sin(3 * M_PI / 8)});
  CHECK(a == Catch::Approx(2.25));
  CHECK(b == Catch::Approx(a));
  CHECK(nu({std::cos(M_PI / 4), std::sin(M_PI / 4)}) == Catch::Approx(3.0));
  // signed permutation invariance at a generic angle
  double th = 0.3;
  CHECK(nu({std::cos(th), std::sin(th)}) ==
        Catch::Approx(nu({std::sin(th), std::cos(th)})));
  CHECK(nu({std::cos(th), std::sin(th)}) ==
        Catch::Approx(nu({-std::cos(th), std::sin(th)})));
  CHECK(nu.nu_min() == Catch::Approx(1.25));
  CHECK(nu.nu_max() == Catch::Approx(3.0));
}

TEST_CASE("nu tables are 2D only") {
  CHECK_THROWS_AS(NuModel::table2d({{0.0, 0.0, 1.0}}, {1.0}), ConfigError);
  auto nu = NuModel::table2d({{1.0, 0.0}}, {2.0});
  CHECK_THROWS_AS(nu({0.0, 0.0, 1.0}), ConfigError);
}

TEST_CASE("i_omega of a flat cut through the unit square") {
  auto dom = unit_square_domain();
  auto val = i_omega(halfplane(1.0, 0.0, 0.5), dom, NuModel::constant(2.0));
  CHECK(val.value == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(val.pieces.size() == 1);
  CHECK(val.pieces[0].area == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("i_omega of a bent oblique cut with the L1 model") {
  auto dom = unit_square_domain();
  // boundary inside the square: 45-degree segment from (1/2, 0) to (3/4, 1/4),
  // then vertical up from (3/4, 1/4)
  double s = 1.0 / std::sqrt(2.0);
  PolyhedralCut cut{ConvexPolytope({{{s, -s}, s * 0.5}, {{1.0, 0.0}, 0.75}})};
  auto nu = NuModel::l1_scaled(1.0);
  auto val = i_omega(cut, dom, nu);
  CHECK(val.value == Catch::Approx(1.25).margin(1e-9));
  double oracle = oracles::cut_value_2d(cut.polytope, dom,
                                        [&](const Vec& n) { return nu(n); });
  CHECK(val.value == Catch::Approx(oracle).margin(1e-9));
}

TEST_CASE("i_omega rejects non-separating or coincident cuts") {
  auto dom = unit_square_domain();
  auto nu = NuModel::constant(1.0);
  // gamma1 not inside the cut
  CHECK_THROWS_AS(i_omega(halfplane(1.0, 0.0, -1.0), dom, nu), GeometryError);
  // gamma2 not outside
  CHECK_THROWS_AS(i_omega(halfplane(1.0, 0.0, 2.0), dom, nu), GeometryError);
  // cut facet coincides with the right side of the square
  CHECK_THROWS_AS(i_omega(halfplane(1.0, 0.0, 1.0), dom, nu), GeometryError);
}

TEST_CASE("i_omega is invariant under re-decomposition of the domain") {
  auto nu = NuModel::l1_scaled(0.7);
  auto rng = oracles::test_rng(21);
  std::uniform_real_distribution<double> off(0.15, 0.85), tilt(-0.3, 0.3);
  for (int rep = 0; rep < 30; ++rep) {
    double phi = tilt(rng);
    Vec n = {std::cos(phi), std::sin(phi)};
    PolyhedralCut cut{ConvexPolytope({{n, off(rng) * n[0]}})};
    double v1, v2, v4;
    try {
      v1 = i_omega(cut, unit_square_domain(1), nu).value;
      v2 = i_omega(cut, unit_square_domain(2), nu).value;
      v4 = i_omega(cut, unit_square_domain(4), nu).value;
    } catch (const GeometryError&) {
      continue;  // tilt made this draw non-separating; skip it
    }
    CHECK(v2 == Catch::Approx(v1).margin(1e-9));
    CHECK(v4 == Catch::Approx(v1).margin(1e-9));
  }
}

TEST_CASE("i_omega with unit nu measures the cut area") {
  auto dom = unit_square_domain();
  auto nu = NuModel::constant(1.0);
  auto rng = oracles::test_rng(33);
  std::uniform_real_distribution<double> off(0.2, 0.8), tilt(-0.25, 0.25);
  for (int rep = 0; rep < 20; ++rep) {
    double phi = tilt(rng);
    Vec n = {std::cos(phi), std::sin(phi)};
    PolyhedralCut cut{ConvexPolytope({{n, off(rng) * n[0]}})};
    try {
      double got = i_omega(cut, dom, nu).value;
      double want = oracles::cut_value_2d(cut.polytope, dom,
                                          [](const Vec&) { return 1.0; });
      CHECK(got == Catch::Approx(want).margin(1e-9));
    } catch (const GeometryError&) {
    }
  }
}

TEST_CASE("flat cut bound on the unit square") {
  auto dom = unit_square_domain();
  auto best = flat_cut_bound(dom, NuModel::constant(1.0), {1.0, 0.0},
                             {0.25, 0.5, 0.75});
  CHECK(best.value == Catch::Approx(1.0).margin(1e-12));
  CHECK(best.best_offset == 0.25);  // constant cross-section: smallest offset wins
  auto zero = flat_cut_bound(dom, NuModel::constant(0.0), {1.0, 0.0}, {0.5});
  CHECK(zero.value == 0.0);
}

TEST_CASE("flat cut bound finds the narrow leg of the L-shape") {
  for (bool split : {false, true}) {
    auto dom = lshape_domain(split);
    std::vector<double> offsets;
    for (int i = 1; i < 40; ++i) offsets.push_back(2.0 * i / 40.0);
    auto best = flat_cut_bound(dom, NuModel::constant(1.0), {1.0, 0.0}, offsets);
    CHECK(best.value == Catch::Approx(0.5).margin(1e-9));
    CHECK(best.best_offset > 1.0);
    CHECK(best.best_offset < 2.0);
  }
}

TEST_CASE("flat cut bound needs a separating offset") {
  auto dom = unit_square_domain();
  CHECK_THROWS_AS(flat_cut_bound(dom, NuModel::constant(1.0), {1.0, 0.0}, {-3.0, 5.0}),
                  GeometryError);
}

TEST_CASE("flat cut value sits between nu_min and nu_max times the section") {
  auto dom = unit_square_domain();
  auto nu = NuModel::l1_scaled(1.0);
  auto best = flat_cut_bound(dom, nu, {1.0, 0.0}, {0.3, 0.5, 0.7});
  CHECK(best.value >= nu.nu_min() * 1.0 - 1e-9);
  CHECK(best.value <= nu.nu_max(2) * 1.0 + 1e-9);
}

TEST_CASE("positivity criterion") {
  CHECK_FALSE(positivity(CapacityLaw::bernoulli(0.3, 1.0), 2));
  CHECK(positivity(CapacityLaw::exponential(1.0), 2));
  // strict inequality at the critical atom
  CHECK_FALSE(positivity(CapacityLaw::bernoulli(0.5, 1.0), 2));
  CHECK(positivity(CapacityLaw::bernoulli(0.51, 1.0), 2));
  CHECK_THROWS_AS(positivity(CapacityLaw::exponential(1.0), 5), ConfigError);
  PcTable table;
  table.values[5] = 0.1;
  CHECK(positivity(CapacityLaw::exponential(1.0), 5, table));
}

TEST_CASE("positivity is monotone in the atom") {
  bool was_positive = true;
  for (double p : {1.0, 0.9, 0.7, 0.51, 0.5, 0.3, 0.0}) {
    bool now = positivity(CapacityLaw::bernoulli(p, 1.0), 2);
    if (!was_positive) CHECK_FALSE(now);
    was_positive = now;
  }
}

TEST_CASE("tilted limit") {
  auto l1 = NuModel::l1_scaled(1.0);
  CHECK(tilted_limit_2d({0.0, 1.0}, 0.0, l1) == Catch::Approx(1.0));
  CHECK(tilted_limit_2d({0.0, 1.0}, M_PI / 2, l1) == Catch::Approx(1.0).margin(1e-6));
  auto c = NuModel::constant(3.0);
  for (double a : {0.0, 0.3, 1.0, M_PI / 2})
    CHECK(tilted_limit_2d({0.0, 1.0}, a, c) == Catch::Approx(3.0).margin(1e-9));
  // nonincreasing in alpha
  double s = 1.0 / std::sqrt(2.0);
  double prev = tilted_limit_2d({s, s}, 0.0, l1);
  for (double a : {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, M_PI / 2}) {
    double cur = tilted_limit_2d({s, s}, a, l1);
    CHECK(cur <= prev + 1e-9);
    prev = cur;
  }
  // at 45 degrees the L1 model prefers the axis directions once allowed
  CHECK(tilted_limit_2d({s, s}, M_PI / 4, l1) == Catch::Approx(std::sqrt(2.0) / 1.0).margin(2e-4).epsilon(0.01));
}

TEST_CASE("convex polygon capacities") {
  auto square = ConvexPolytope::box({0.0, 0.0}, {1.0, 1.0});
  CHECK(convex_set_capacity_2d(square, NuModel::constant(1.0)) ==
        Catch::Approx(4.0).margin(1e-9));
  CHECK(convex_set_capacity_2d(square, NuModel::l1_scaled(1.0)) ==
        Catch::Approx(4.0).margin(1e-9));
  auto big = ConvexPolytope::box({0.0, 0.0}, {2.0, 2.0});
  CHECK(convex_set_capacity_2d(big, NuModel::constant(1.0)) ==
        Catch::Approx(8.0).margin(1e-9));
  // degenerate polygon
  ConvexPolytope segment({{{0.0, 1.0}, 0.0},
                          {{0.0, -1.0}, 0.0},
                          {{1.0, 0.0}, 1.0},
                          {{-1.0, 0.0}, 0.0}});
  CHECK_THROWS_AS(convex_set_capacity_2d(segment, NuModel::constant(1.0)),
                  GeometryError);
}
