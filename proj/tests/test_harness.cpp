#include <catch_amalgamated.hpp>

#include <sstream>

#include "oracles.hpp"
#include "percoflow/harness.hpp"

using namespace percoflow;

namespace {

Domain unit_square_domain() {
  auto square = ConvexPolytope::box({0.0, 0.0}, {1.0, 1.0});
  return Domain({square}, {{0, 1, std::nullopt}}, {{0, 0, std::nullopt}});
}

// the frozen CSV with the timing column blanked, for determinism comparisons
std::string strip_seconds(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    auto pos = line.rfind(',');
    out += line.substr(0, pos);
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("deterministic boundary-row correction on the unit square") {
  auto dom = unit_square_domain();
  auto res = run_converge(dom, CapacityLaw::constant(1.0), {2, 4, 8}, 1, 0, 1);
  REQUIRE(res.rows.size() == 3);
  CHECK(res.rows[0].mean == Catch::Approx(1.5).margin(1e-12));
  CHECK(res.rows[1].mean == Catch::Approx(1.25).margin(1e-12));
  CHECK(res.rows[2].mean == Catch::Approx(1.125).margin(1e-12));
  for (const auto& r : res.rows) CHECK(r.stddev == 0.0);
}

TEST_CASE("zero capacities give zero means") {
  auto res = run_converge(unit_square_domain(), CapacityLaw::constant(0.0), {2, 4}, 3,
                          9, 1);
  for (const auto& r : res.rows) {
    CHECK(r.mean == 0.0);
    CHECK(r.stddev == 0.0);
  }
}

TEST_CASE("capacity scaling couples trial by trial") {
  auto dom = unit_square_domain();
  auto lo = run_converge(dom, CapacityLaw::bernoulli(0.5, 1.0), {2, 4}, 10, 42, 1);
  auto hi = run_converge(dom, CapacityLaw::bernoulli(0.5, 2.0), {2, 4}, 10, 42, 1);
  REQUIRE(lo.records.size() == hi.records.size());
  for (std::size_t i = 0; i < lo.records.size(); ++i) {
    CHECK(hi.records[i].phi == 2 * lo.records[i].phi);
    CHECK(hi.records[i].seed == lo.records[i].seed);
  }
}

TEST_CASE("output is deterministic across thread counts") {
  auto dom = unit_square_domain();
  std::string csvs[3];
  int idx = 0;
  for (int threads : {1, 2, 4}) {
    auto res =
        run_converge(dom, CapacityLaw::exponential(1.0), {2, 4}, 8, 7, threads);
    std::ostringstream os;
    write_converge_csv(os, res.rows);
    csvs[idx++] = strip_seconds(os.str());
  }
  CHECK(csvs[0] == csvs[1]);
  CHECK(csvs[0] == csvs[2]);
}

TEST_CASE("converge reports the flat-cut bound when a nu model is given") {
  auto dom = unit_square_domain();
  auto nu = NuModel::constant(1.0);
  Vec axis = {1.0, 0.0};
  auto res = run_converge(dom, CapacityLaw::constant(1.0), {2}, 1, 0, 1, &nu, &axis, 16);
  REQUIRE(res.flat_cut.has_value());
  CHECK(res.flat_cut->value == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("config validation") {
  auto dom = unit_square_domain();
  auto law = CapacityLaw::constant(1.0);
  CHECK_THROWS_AS(run_converge(dom, law, {4, 2}, 1, 0, 1), ConfigError);
  CHECK_THROWS_AS(run_converge(dom, law, {2, 2}, 1, 0, 1), ConfigError);
  CHECK_THROWS_AS(run_converge(dom, law, {}, 1, 0, 1), ConfigError);
  CHECK_THROWS_AS(run_converge(dom, law, {2}, 0, 0, 1), ConfigError);
}

TEST_CASE("discretization failures report the failing n") {
  auto tiny = ConvexPolytope::box({0.0, 0.0}, {0.2, 0.2});
  Domain dom({tiny}, {{0, 1, std::nullopt}}, {{0, 0, std::nullopt}});
  try {
    run_converge(dom, CapacityLaw::constant(1.0), {1}, 1, 0, 1);
    FAIL("expected a geometry error");
  } catch (const GeometryError& e) {
    CHECK(std::string(e.what()).find("n = 1") != std::string::npos);
  }
}

TEST_CASE("degenerate phase endpoints") {
  auto dom = unit_square_domain();
  auto res = run_phase(dom, {0.0, 1.0}, 1.0, {2, 4}, 2, 5, 1);
  REQUIRE(res.cells.size() == 4);
  for (const auto& c : res.cells) {
    if (c.p == 0.0) CHECK(c.mean == 0.0);
    if (c.p == 1.0)
      CHECK(c.mean == Catch::Approx((c.n + 1.0) / c.n).margin(1e-12));
  }
  REQUIRE(res.transition_p.has_value());
  CHECK(*res.transition_p == 0.0);
}

TEST_CASE("frozen CSV headers") {
  std::ostringstream conv, phase, nu;
  write_converge_csv(conv, {});
  write_phase_csv(phase, {});
  write_nu_csv(nu, {});
  CHECK(conv.str() == "n,mean,std,ci95,trials,seconds\n");
  CHECK(phase.str() == "p,n,mean,std,ci95,trials,seconds\n");
  CHECK(nu.str() == "n,mean,ci95,trials,seconds\n");
}

TEST_CASE("trial records regenerate from their seeds") {
  auto dom = unit_square_domain();
  auto law = CapacityLaw::uniform(0.0, 1.0);
  auto res = run_converge(dom, law, {3}, 5, 123, 1);
  auto lat = discretize(dom, 3);
  for (const auto& rec : res.records) {
    CHECK(rec.seed == derive_seed(123, 3, rec.trial));
    auto caps = sample(law, lat, rec.seed);
    auto fr = max_flow(lat, caps, lat.gamma1_n(), lat.gamma2_n());
    CHECK(fr.value == rec.phi);
    CHECK(fr.cut.edges.size() == rec.cut_size);
  }
}

TEST_CASE("variance of the normalized flow decays with n") {
  // statistical: exponential law on the unit square, 200 trials per mesh
  auto res = run_converge(unit_square_domain(), CapacityLaw::exponential(1.0),
                          {8, 16, 32}, 200, 2718, 0);
  REQUIRE(res.rows.size() == 3);
  CHECK(res.rows[1].stddev <= res.rows[0].stddev);
  CHECK(res.rows[2].stddev <= res.rows[1].stddev);
}
