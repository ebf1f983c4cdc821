#include <catch_amalgamated.hpp>

#include <set>

#include "oracles.hpp"
#include "percoflow/cylinder.hpp"

using namespace percoflow;

namespace {

CylinderSpec segment_cyl(double h) {
  // A = [0,1] x {0}, axis (0,1)
  return make_cylinder({0.5, 0.0}, {{1.0, 0.0}}, {0.5}, h, {0.0, 1.0});
}

// D(k, m) = [0,k] x [0,m] flowing bottom -> top
CylinderSpec straight_cyl(double k, double m) {
  return make_cylinder({k / 2.0, m / 2.0}, {{1.0, 0.0}}, {k / 2.0}, m / 2.0,
                       {0.0, 1.0});
}

std::set<std::pair<int, int>> coords_of(const CylinderInstance& inst,
                                        const std::vector<uint32_t>& idx) {
  std::set<std::pair<int, int>> out;
  for (uint32_t u : idx) {
    auto k = inst.lattice.vertex(u);
    out.insert({k[0], k[1]});
  }
  return out;
}

}  // namespace

TEST_CASE("marked sets of the unit segment cylinder at n = 1") {
  auto inst = build_cylinder_instance(segment_cyl(1.0), 1);
  CHECK(inst.lattice.vertex_count() == 6);
  CHECK(coords_of(inst, inst.top) == std::set<std::pair<int, int>>{{0, 1}, {1, 1}});
  CHECK(coords_of(inst, inst.bottom) == std::set<std::pair<int, int>>{{0, -1}, {1, -1}});
  // the lateral half-boundaries partition strictly above / strictly below
  for (uint32_t u : inst.a1h) CHECK(inst.lattice.vertex(u)[1] > 0);
  for (uint32_t u : inst.a2h) CHECK(inst.lattice.vertex(u)[1] < 0);
  std::set<uint32_t> a1(inst.a1h.begin(), inst.a1h.end());
  for (uint32_t u : inst.a2h) CHECK_FALSE(a1.count(u));
}

TEST_CASE("cylinders thinner than the mesh fail") {
  CHECK_THROWS_AS(build_cylinder_instance(segment_cyl(0.05), 1), GeometryError);
}

TEST_CASE("tau on zero capacities vanishes") {
  auto inst = build_cylinder_instance(segment_cyl(1.0), 2);
  auto caps = sample(CapacityLaw::constant(0.0), inst.lattice, 0);
  CHECK(tau(inst, caps) == 0);
  CHECK(phi_cyl(inst, caps) == 0);
}

TEST_CASE("tau matches brute force on small instances") {
  for (int n : {1, 2}) {
    auto inst = build_cylinder_instance(segment_cyl(1.0), n);
    for (uint64_t seed = 0; seed < 6; ++seed) {
      auto caps = sample(CapacityLaw::bernoulli(0.6, 1.0), inst.lattice, seed);
      CHECK(tau(inst, caps) ==
            oracles::brute_force_min_cut(inst.lattice, caps, inst.a1h, inst.a2h));
    }
    auto caps1 = sample(CapacityLaw::constant(1.0), inst.lattice, 0);
    CHECK(tau(inst, caps1) ==
          oracles::brute_force_min_cut(inst.lattice, caps1, inst.a1h, inst.a2h));
  }
}

TEST_CASE("tau with unit capacities equals the column count") {
  // lower bound: one vertex-disjoint column path per lattice column of the
  // base; upper bound: the flat layer of vertical edges across hyp(A)
  for (int n : {1, 2, 4}) {
    auto inst = build_cylinder_instance(segment_cyl(1.0), n);
    auto caps = sample(CapacityLaw::constant(1.0), inst.lattice, 0);
    CHECK(tau(inst, caps) == static_cast<Cap>(n + 1) * kCapOne);
  }
}

TEST_CASE("doubling a constant law doubles tau") {
  auto inst = build_cylinder_instance(segment_cyl(1.0), 3);
  auto caps1 = sample(CapacityLaw::constant(1.0), inst.lattice, 0);
  auto caps2 = sample(CapacityLaw::constant(2.0), inst.lattice, 0);
  CHECK(tau(inst, caps2) == 2 * tau(inst, caps1));
}

TEST_CASE("phi through straight unit-capacity boxes counts columns") {
  for (int k = 1; k <= 4; ++k) {
    for (int m = 1; m <= 4; ++m) {
      auto inst = build_cylinder_instance(straight_cyl(k, m), 1);
      auto caps = sample(CapacityLaw::constant(1.0), inst.lattice, 0);
      Cap got = phi_cyl(inst, caps);
      if ((k + 1) * (m + 1) <= 30) {
        CHECK(got == oracles::brute_force_min_cut(inst.lattice, caps, inst.bottom,
                                                  inst.top));
      }
      CHECK(got == static_cast<Cap>(k + 1) * kCapOne);
    }
  }
}

TEST_CASE("phi is bounded by the flat cut at height zero") {
  auto rng = oracles::test_rng(8);
  auto inst = build_cylinder_instance(segment_cyl(1.0), 3);
  for (int rep = 0; rep < 10; ++rep) {
    auto caps = sample(CapacityLaw::exponential(1.0), inst.lattice, rng());
    // bipartition cut by the sign of the height
    Cap flat = 0;
    for (std::size_t e = 0; e < inst.lattice.edge_count(); ++e) {
      const auto& le = inst.lattice.edges()[e];
      double hu = inst.spec.height(inst.lattice.position(le.u));
      double hv = inst.spec.height(inst.lattice.position(le.v));
      if ((hu <= kGeomTol) != (hv <= kGeomTol)) flat += caps.value(e);
    }
    CHECK(phi_cyl(inst, caps) <= flat);
  }
}

TEST_CASE("tau is symmetric under v -> -v and axis swap") {
  auto spec_up = segment_cyl(1.0);
  auto spec_down = make_cylinder({0.5, 0.0}, {{1.0, 0.0}}, {0.5}, 1.0, {0.0, -1.0});
  auto spec_right = make_cylinder({0.0, 0.5}, {{0.0, 1.0}}, {0.5}, 1.0, {1.0, 0.0});
  for (int n : {1, 2, 3}) {
    auto a = build_cylinder_instance(spec_up, n);
    auto b = build_cylinder_instance(spec_down, n);
    auto c = build_cylinder_instance(spec_right, n);
    auto ca = sample(CapacityLaw::constant(1.5), a.lattice, 0);
    auto cb = sample(CapacityLaw::constant(1.5), b.lattice, 0);
    auto cc = sample(CapacityLaw::constant(1.5), c.lattice, 0);
    CHECK(tau(a, ca) == tau(b, cb));
    CHECK(tau(a, ca) == tau(c, cc));
  }
}

TEST_CASE("tau never decreases when capacities rise") {
  auto inst = build_cylinder_instance(segment_cyl(1.0), 2);
  auto caps = sample(CapacityLaw::uniform(0.0, 1.0), inst.lattice, 5);
  Cap base = tau(inst, caps);
  auto vals = caps.values();
  for (auto& v : vals) v += kCapOne / 4;
  CapacityAssignment more(caps.law(), caps.seed(), std::move(vals));
  CHECK(tau(inst, more) >= base);
}

TEST_CASE("estimate_nu on the unit-capacity law is deterministic") {
  auto est = estimate_nu({0.0, 1.0}, CapacityLaw::constant(1.0), 4.0, 1.0, {2, 4, 8},
                         3, 17, 1);
  REQUIRE(est.rows.size() == 3);
  for (const auto& row : est.rows) {
    CHECK(row.stddev == 0.0);
    CHECK(row.ci95 == 0.0);
    // tau = 4n + 1 unit edges across the flat layer
    CHECK(row.mean == Catch::Approx(1.0 + 1.0 / (4.0 * row.n)).margin(1e-12));
  }
  CHECK(est.point_estimate() == Catch::Approx(1.0 + 1.0 / 32.0).margin(1e-12));
}

TEST_CASE("estimate_nu scales linearly in a constant law") {
  auto a = estimate_nu({0.0, 1.0}, CapacityLaw::constant(1.0), 4.0, 1.0, {2, 4}, 2, 3, 1);
  auto b = estimate_nu({0.0, 1.0}, CapacityLaw::constant(2.0), 4.0, 1.0, {2, 4}, 2, 3, 1);
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    CHECK(b.rows[i].mean == Catch::Approx(2.0 * a.rows[i].mean).margin(1e-12));
}

TEST_CASE("estimate_nu validates its input") {
  CHECK_THROWS_AS(estimate_nu({0.0, 1.0}, CapacityLaw::constant(1.0), 4.0, 1.0, {4, 2},
                              2, 0, 1),
                  ConfigError);
  CHECK_THROWS_AS(estimate_nu({0.0, 1.0}, CapacityLaw::constant(1.0), 4.0, 1.0, {}, 2,
                              0, 1),
                  ConfigError);
  CHECK_THROWS_AS(estimate_nu({0.0, 1.0}, CapacityLaw::constant(1.0), 4.0, 1.0, {2}, 0,
                              0, 1),
                  ConfigError);
  CHECK_THROWS_AS(estimate_nu({0.0, 1.0}, CapacityLaw::constant(1.0), -1.0, 1.0, {2}, 1,
                              0, 1),
                  GeometryError);
}

TEST_CASE("nu is insensitive to the cylinder height") {
  // the limit does not depend on h; for the unit-capacity law the flat cut
  // makes this exact at every mesh
  for (int n : {2, 4}) {
    auto shallow = estimate_nu({0.0, 1.0}, CapacityLaw::constant(1.0), 4.0, 1.0, {n},
                               1, 0, 1);
    auto tall = estimate_nu({0.0, 1.0}, CapacityLaw::constant(1.0), 4.0, 2.0, {n},
                            1, 0, 1);
    CHECK(shallow.point_estimate() == tall.point_estimate());
  }
  // statistical version for a random law: overlapping confidence intervals
  auto a = estimate_nu({0.0, 1.0}, CapacityLaw::bernoulli(0.7, 1.0), 4.0, 1.0, {8},
                       40, 12, 0);
  auto b = estimate_nu({0.0, 1.0}, CapacityLaw::bernoulli(0.7, 1.0), 4.0, 2.0, {8},
                       40, 13, 0);
  CHECK(std::abs(a.point_estimate() - b.point_estimate()) <=
        a.point_ci() + b.point_ci() + 0.05);
}

TEST_CASE("subcritical laws drive the estimate to zero") {
  // Lambda(0) = 0.7 >= 1/2, so nu vanishes; at n = 32 the estimate is tiny
  auto est = estimate_nu({0.0, 1.0}, CapacityLaw::bernoulli(0.3, 1.0), 4.0, 1.0, {32},
                         20, 77, 0);
  CHECK(est.point_estimate() < 0.05);
}

TEST_CASE("disc bases build as inscribed polygons in d = 3") {
  auto spec = make_cylinder_disc({0.0, 0.0, 0.0}, 1.0, 1.0, {0.0, 0.0, 1.0}, 32);
  // area of the inscribed regular 32-gon
  CHECK(spec.base_measure == Catch::Approx(16.0 * std::sin(M_PI / 16.0)).margin(1e-9));
  auto inst = build_cylinder_instance(spec, 2);
  CHECK(!inst.top.empty());
  CHECK(!inst.bottom.empty());
  auto caps = sample(CapacityLaw::constant(1.0), inst.lattice, 0);
  CHECK(phi_cyl(inst, caps) > 0);
  CHECK_THROWS_AS(make_cylinder_disc({0.0, 0.0}, 1.0, 1.0, {0.0, 1.0}, 32),
                  GeometryError);
}

TEST_CASE("tilted cylinder instances build and solve") {
  double s = 1.0 / std::sqrt(2.0);
  auto spec = make_cylinder({0.0, 0.0}, {{s, s}}, {1.0}, 0.5, {-s, s});
  auto inst = build_cylinder_instance(spec, 4);
  CHECK(inst.lattice.vertex_count() > 0);
  CHECK(!inst.a1h.empty());
  CHECK(!inst.a2h.empty());
  auto caps = sample(CapacityLaw::constant(1.0), inst.lattice, 0);
  Cap t = tau(inst, caps);
  CHECK(t > 0);
  // duality spot check through the second solver
  CHECK(t == max_flow(inst.lattice, caps, inst.a1h, inst.a2h,
                      FlowAlgorithm::BfsAugmenting)
                 .value);
}
