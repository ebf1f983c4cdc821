#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "percoflow/capacity.hpp"
#include "percoflow/errors.hpp"
#include "percoflow/flow_solver.hpp"
#include "percoflow/geometry.hpp"
#include "percoflow/lattice.hpp"
#include "percoflow/parallel.hpp"
#include "percoflow/stats.hpp"

namespace percoflow {

// The discrete cylinder graph with its four marked vertex sets:
//   a1h / a2h — boundary vertices of the two components of cyl \ hyp(A),
//   top / bottom — vertices with an edge leaving through A+hv / A-hv.
struct CylinderInstance {
  CylinderSpec spec;
  int n = 0;
  Lattice lattice;
  std::vector<uint32_t> a1h, a2h, top, bottom;
};

inline CylinderInstance build_cylinder_instance(const CylinderSpec& spec, int n) {
  if (n < 1) throw ConfigError("mesh parameter n must be >= 1");
  const int d = spec.dim();
  const ConvexPolytope& body = spec.body;
  auto [blo, bhi] = body.bounding_box();
  std::vector<int32_t> lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = static_cast<int32_t>(std::ceil(n * blo[i] - 1e-9));
    hi[i] = static_cast<int32_t>(std::floor(n * bhi[i] + 1e-9));
  }
  auto member = [&](std::span<const int32_t> k) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = static_cast<double>(k[i]) / n;
    return body.contains(x);
  };
  auto coords = detail::scan_box(lo, hi, member);
  if (coords.empty()) throw GeometryError("cylinder too thin for mesh");
  Lattice stage(d, n, coords, {}, {}, {}, {});
  auto edges = detail::nearest_neighbour_edges(stage);

  CylinderInstance inst{spec, n,
                        Lattice(d, n, std::move(coords), std::move(edges), {}, {}, {}),
                        {}, {}, {}, {}};
  const Lattice& lat = inst.lattice;

  // exit point of the segment x -> y (x inside the closed body, y outside)
  auto exit_point = [&](const Vec& x, const Vec& y) {
    double t1 = 1.0;
    Vec dir = sub(y, x);
    for (const auto& h : body.halfspaces()) {
      double dv = dot(h.normal, dir);
      if (dv <= kGeomTol * norm2(h.normal)) continue;
      double t = (h.offset - dot(h.normal, x)) / dv;
      t1 = std::min(t1, std::max(t, 0.0));
    }
    return axpy(x, t1, dir);
  };

  std::vector<int32_t> nb(d);
  for (uint32_t u = 0; u < lat.vertex_count(); ++u) {
    auto k = lat.vertex(u);
    Vec x = lat.position(u);
    bool exposed = false;
    bool touches_top = false, touches_bottom = false;
    for (int a = 0; a < d; ++a) {
      for (int s : {-1, +1}) {
        for (int i = 0; i < d; ++i) nb[i] = k[i];
        nb[a] += s;
        if (lat.find(nb) >= 0) continue;  // neighbour still inside cyl(A,h)
        exposed = true;
        Vec y(d);
        for (int i = 0; i < d; ++i) y[i] = static_cast<double>(nb[i]) / n;
        Vec q = exit_point(x, y);
        double hq = spec.height(q);
        if (std::abs(hq - spec.half_height) <= kGeomTol) touches_top = true;
        if (std::abs(hq + spec.half_height) <= kGeomTol) touches_bottom = true;
      }
    }
    if (!exposed) continue;
    double hx = spec.height(x);
    if (hx > kGeomTol) inst.a1h.push_back(u);
    if (hx < -kGeomTol) inst.a2h.push_back(u);
    if (touches_top) inst.top.push_back(u);
    if (touches_bottom) inst.bottom.push_back(u);
  }

  if (inst.top.empty() || inst.bottom.empty() || inst.a1h.empty() || inst.a2h.empty())
    throw GeometryError("cylinder too thin for mesh");
  for (uint32_t u : inst.top)
    for (uint32_t v : inst.bottom)
      if (u == v) throw GeometryError("cylinder too thin for mesh");
  return inst;
}

// tau(A,h): maximal flow between the two lateral half-boundaries.
inline Cap tau(const CylinderInstance& inst, const CapacityAssignment& caps) {
  return max_flow(inst.lattice, caps, inst.a1h, inst.a2h).value;
}

// phi(A,h): maximal flow from the bottom to the top of the cylinder.
inline Cap phi_cyl(const CylinderInstance& inst, const CapacityAssignment& caps) {
  return max_flow(inst.lattice, caps, inst.bottom, inst.top).value;
}

struct NuEstimateRow {
  int n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double ci95 = 0.0;
  int trials = 0;
  double seconds = 0.0;
};

// Monte-Carlo estimates of tau_n / (n^{d-1} H^{d-1}(A)) over a mesh ladder;
// the largest-n row is the point estimate of nu(v).
struct NuEstimate {
  Vec direction;
  CapacityLaw law = CapacityLaw::constant(0.0);
  std::vector<NuEstimateRow> rows;
  int trials = 0;

  double point_estimate() const { return rows.back().mean; }
  double point_ci() const { return rows.back().ci95; }
};

inline NuEstimate estimate_nu(const Vec& v, const CapacityLaw& law, double base_size,
                              double h, const std::vector<int>& n_list, int trials,
                              uint64_t seed, int threads = 0) {
  if (trials < 1) throw ConfigError("estimate_nu needs trials >= 1");
  if (n_list.empty()) throw ConfigError("estimate_nu needs at least one mesh");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] < n_list[i - 1])
      throw ConfigError("mesh list must be nondecreasing");
  if (base_size <= 0.0) throw GeometryError("degenerate cylinder base");
  const int d = static_cast<int>(v.size());
  Vec center(d, 0.0);
  auto spec = make_cylinder_square(center, base_size, h, v);

  NuEstimate out;
  out.direction = normalized(v);
  out.law = law;
  out.trials = trials;
  const double area = spec.base_measure;
  for (int n : n_list) {
    auto t0 = std::chrono::steady_clock::now();
    auto inst = build_cylinder_instance(spec, n);
    const double scale =
        std::pow(static_cast<double>(n), d - 1) * area;
    std::vector<double> xs(trials);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
      auto caps = sample(law, inst.lattice, derive_seed(seed, n, t));
      xs[t] = cap_to_double(tau(inst, caps)) / scale;
    });
    auto ms = mean_std(xs);
    double seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    out.rows.push_back({n, ms.mean, ms.stddev, ms.ci95, trials, seconds});
  }
  return out;
}

}  // namespace percoflow
