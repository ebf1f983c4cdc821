#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "percoflow/capacity.hpp"
#include "percoflow/errors.hpp"
#include "percoflow/geometry.hpp"

namespace percoflow {

// Direction-dependent capacity per unit of cut area. Either an analytic toy
// model or a table of Monte-Carlo estimates over sampled directions.
//
// Table interpolation (d = 2): directions are folded into the fundamental
// sector [0, pi/4] of the lattice symmetry group (nu(v) = nu(-v) and nu is
// invariant under signed coordinate permutations), estimates landing on the
// same folded angle are averaged, and evaluation is piecewise linear in the
// angle. Queries outside the sampled range clamp to the nearest sample.
class NuModel {
 public:
  static NuModel constant(double nu0) {
    if (nu0 < 0) throw ConfigError("nu must be >= 0");
    NuModel m;
    m.kind_ = Kind::Constant;
    m.c_ = nu0;
    m.min_ = m.max_ = nu0;
    return m;
  }

  // nu(v) = c * |v|_1, the unit-capacity lattice model
  static NuModel l1_scaled(double c) {
    if (c < 0) throw ConfigError("nu must be >= 0");
    NuModel m;
    m.kind_ = Kind::L1Scaled;
    m.c_ = c;
    m.min_ = c;
    m.max_ = 0.0;  // set on first use; depends on the query dimension
    return m;
  }

  static NuModel table2d(const std::vector<Vec>& directions,
                         const std::vector<double>& values) {
    if (directions.empty() || directions.size() != values.size())
      throw ConfigError("nu table needs matching directions/values");
    NuModel m;
    m.kind_ = Kind::Table;
    std::vector<std::pair<double, std::pair<double, int>>> acc;
    for (std::size_t i = 0; i < directions.size(); ++i) {
      if (directions[i].size() != 2)
        throw ConfigError("nu table interpolation is implemented for d = 2");
      if (values[i] < 0) throw ConfigError("nu must be >= 0");
      double th = fold_angle(std::atan2(directions[i][1], directions[i][0]));
      bool merged = false;
      for (auto& [angle, mv] : acc) {
        if (std::abs(angle - th) < 1e-9) {
          mv.first += values[i];
          mv.second += 1;
          merged = true;
          break;
        }
      }
      if (!merged) acc.push_back({th, {values[i], 1}});
    }
    std::sort(acc.begin(), acc.end());
    for (const auto& [angle, mv] : acc) {
      m.angles_.push_back(angle);
      m.values_.push_back(mv.first / mv.second);
    }
    m.min_ = *std::min_element(m.values_.begin(), m.values_.end());
    m.max_ = *std::max_element(m.values_.begin(), m.values_.end());
    return m;
  }

  double operator()(const Vec& v) const {
    switch (kind_) {
      case Kind::Constant:
        return c_;
      case Kind::L1Scaled:
        return c_ * norm1(v) / norm2(v);
      case Kind::Table: {
        if (v.size() != 2)
          throw ConfigError("nu table interpolation is implemented for d = 2");
        double th = fold_angle(std::atan2(v[1], v[0]));
        if (th <= angles_.front()) return values_.front();
        if (th >= angles_.back()) return values_.back();
        auto it = std::upper_bound(angles_.begin(), angles_.end(), th);
        std::size_t hi = static_cast<std::size_t>(it - angles_.begin());
        double t = (th - angles_[hi - 1]) / (angles_[hi] - angles_[hi - 1]);
        return values_[hi - 1] + t * (values_[hi] - values_[hi - 1]);
      }
    }
    return 0.0;
  }

  double nu_min() const { return min_; }

  double nu_max(int dim = 2) const {
    if (kind_ == Kind::L1Scaled) return c_ * std::sqrt(static_cast<double>(dim));
    return max_;
  }

 private:
  enum class Kind { Constant, L1Scaled, Table };

  // canonical representative in [0, pi/4] under the dihedral symmetries
  static double fold_angle(double th) {
    const double quarter = M_PI / 2.0;
    th = std::fmod(th, quarter);
    if (th < 0) th += quarter;
    if (th > M_PI / 4.0) th = quarter - th;
    return th;
  }

  Kind kind_ = Kind::Constant;
  double c_ = 0.0;
  double min_ = 0.0, max_ = 0.0;
  std::vector<double> angles_, values_;
};

// A candidate continuous cut: a convex polyhedral set P intended to contain
// gamma1 in its interior and keep gamma2 strictly outside. The capacity of
// the cut is the nu-weighted area of (boundary of P) inside the domain.
struct PolyhedralCut {
  ConvexPolytope polytope;
};

struct CutPiece {
  int facet = 0;
  double area = 0.0;
  Vec normal;
  double nu_value = 0.0;
};

struct CapacityFunctionalValue {
  double value = 0.0;
  std::vector<CutPiece> pieces;
};

namespace detail {

// H^{d-1} measure of (facet hyperplane cap other constraints cap union of
// domain pieces), by inclusion-exclusion over the pieces.
inline double fragment_measure(const Vec& normal, double offset,
                               const std::vector<Halfspace>& base,
                               const std::vector<ConvexPolytope>& pieces) {
  const std::size_t m = pieces.size();
  double total = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    std::vector<Halfspace> cons = base;
    int bits = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (std::size_t{1} << i)) {
        ++bits;
        const auto& hs = pieces[i].halfspaces();
        cons.insert(cons.end(), hs.begin(), hs.end());
      }
    }
    double v = measure_in_hyperplane(normal, offset, cons);
    total += (bits % 2 == 1) ? v : -v;
  }
  return std::max(0.0, total);
}

}  // namespace detail

// I_Omega(P) for a separating polyhedral set: the integral of nu over the
// boundary of P inside Omega reduces to a sum of facet-fragment areas
// weighted by nu of the facet normal.
inline CapacityFunctionalValue i_omega(const PolyhedralCut& cut, const Domain& dom,
                                       const NuModel& nu) {
  const ConvexPolytope& P = cut.polytope;
  if (P.dim() != dom.dim())
    throw ConfigError("cut dimension does not match the domain");

  // transversality: a cut facet lying inside a domain facet plane makes the
  // surface integral ambiguous and is rejected
  for (const auto& hf : P.halfspaces()) {
    Vec nf = normalized(hf.normal);
    double bf = hf.offset / norm2(hf.normal);
    for (const auto& piece : dom.pieces()) {
      for (const auto& hg : piece.halfspaces()) {
        Vec ng = normalized(hg.normal);
        double bg = hg.offset / norm2(hg.normal);
        bool same = approx_eq(nf, ng, 1e-9) && std::abs(bf - bg) <= 1e-9;
        bool flipped = approx_eq(nf, scaled(ng, -1.0), 1e-9) && std::abs(bf + bg) <= 1e-9;
        if (same || flipped)
          throw GeometryError("cut facet is parallel-coincident with a domain facet");
      }
    }
  }

  // gamma1 must be interior to P, gamma2 disjoint from it
  for (const auto& patch : dom.gamma1_polytopes())
    for (const auto& vtx : patch.vertices())
      if (!P.strictly_contains(vtx))
        throw GeometryError("not a separating polyhedral set: gamma1 escapes the cut");
  for (const auto& patch : dom.gamma2_polytopes()) {
    std::vector<Halfspace> joint = patch.halfspaces();
    joint.insert(joint.end(), P.halfspaces().begin(), P.halfspaces().end());
    if (min_max_violation(joint) <= kGeomTol)
      throw GeometryError("not a separating polyhedral set: gamma2 touches the cut");
  }

  CapacityFunctionalValue out;
  const auto& hs = P.halfspaces();
  for (int f = 0; f < static_cast<int>(hs.size()); ++f) {
    std::vector<Halfspace> base;
    for (int i = 0; i < static_cast<int>(hs.size()); ++i)
      if (i != f) base.push_back(hs[i]);
    double area = detail::fragment_measure(hs[f].normal, hs[f].offset, base,
                                           dom.pieces());
    if (area <= kGeomTol) continue;
    Vec n = normalized(hs[f].normal);
    double w = nu(n);
    out.value += area * w;
    out.pieces.push_back({f, area, n, w});
  }
  return out;
}

struct FlatCutResult {
  double best_offset = 0.0;
  double value = 0.0;
  CapacityFunctionalValue detail;
};

// Minimizes I_Omega over the family of flat cuts {x . axis <= offset} on the
// given offset grid. The result is an upper bound for the continuous min-cut
// over all separating polyhedral sets. Ties keep the smallest offset.
inline FlatCutResult flat_cut_bound(const Domain& dom, const NuModel& nu,
                                    const Vec& axis, std::vector<double> offsets) {
  if (offsets.empty()) throw ConfigError("flat cut needs a nonempty offset grid");
  Vec a = normalized(axis);
  std::sort(offsets.begin(), offsets.end());
  bool found = false;
  FlatCutResult best;
  for (double o : offsets) {
    PolyhedralCut cut{ConvexPolytope({{a, o}})};
    CapacityFunctionalValue v;
    try {
      v = i_omega(cut, dom, nu);
    } catch (const GeometryError&) {
      continue;  // this offset does not separate, or is not transverse
    }
    if (!found || v.value < best.value) {
      found = true;
      best = {o, v.value, std::move(v)};
    }
  }
  if (!found)
    throw GeometryError("no offset in the grid separates gamma1 from gamma2");
  return best;
}

// Critical bond-percolation probabilities p_c(d): exact 1/2 in d = 2,
// configurable numerical values elsewhere.
struct PcTable {
  std::map<int, double> values;

  static PcTable defaults() {
    PcTable t;
    t.values[2] = 0.5;        // exact
    t.values[3] = 0.2488126;  // accepted numerical value
    return t;
  }

  double at(int d) const {
    auto it = values.find(d);
    if (it == values.end())
      throw ConfigError("no p_c value configured for dimension " + std::to_string(d));
    return it->second;
  }
};

// The positivity criterion of the limit: the flow constant is positive if
// and only if the atom of the capacity law at zero is below 1 - p_c(d).
inline bool positivity(const CapacityLaw& law, int d,
                       const PcTable& pc = PcTable::defaults()) {
  if (d < 2) throw ConfigError("dimension must be >= 2");
  return law.atom_at_zero() < 1.0 - pc.at(d);
}

// Limit of the rescaled flow through a tilted 2D cylinder with aspect angle
// alpha: inf { nu(v') / (v . v') : v . v' >= cos(alpha) }. Evaluated by a
// 1e-4 grid over the admissible angles with local refinement.
inline double tilted_limit_2d(const Vec& v, double alpha, const NuModel& nu) {
  if (v.size() != 2) throw ConfigError("tilted cylinder formula is 2D only");
  if (alpha < 0 || alpha > M_PI / 2 + 1e-12)
    throw ConfigError("alpha must be in [0, pi/2]");
  Vec u = normalized(v);
  auto f = [&](double th) {
    double c = std::cos(th), s = std::sin(th);
    Vec vp = {u[0] * c - u[1] * s, u[0] * s + u[1] * c};
    double denom = std::cos(th);
    if (denom < 1e-15) return std::numeric_limits<double>::infinity();
    return nu(vp) / denom;
  };
  double lo = -alpha, hi = alpha;
  double best_th = 0.0, best = f(0.0);
  double step = 1e-4;
  for (int round = 0; round < 3; ++round) {
    for (double th = lo; th <= hi + step / 2; th += step) {
      double val = f(std::clamp(th, -alpha, alpha));
      if (val < best) {
        best = val;
        best_th = std::clamp(th, -alpha, alpha);
      }
    }
    lo = std::max(-alpha, best_th - step);
    hi = std::min(alpha, best_th + step);
    step /= 100.0;
  }
  return best;
}

// Boundary capacity of a bounded convex polygon: sum over edges of
// length times nu(outward normal). In 2D this is the limit of the rescaled
// flow between nA and infinity.
inline double convex_set_capacity_2d(const ConvexPolytope& poly, const NuModel& nu) {
  if (poly.dim() != 2) throw ConfigError("convex set capacity is 2D only");
  auto verts = poly.vertices();
  if (verts.size() < 3) throw GeometryError("degenerate polygon");
  Vec c(2, 0.0);
  for (const auto& v : verts) c = add(c, v);
  c = scaled(c, 1.0 / verts.size());
  std::sort(verts.begin(), verts.end(), [&](const Vec& a, const Vec& b) {
    return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
  });
  double total = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Vec& p = verts[i];
    const Vec& q = verts[(i + 1) % verts.size()];
    Vec d = sub(q, p);
    double len = norm2(d);
    if (len < kGeomTol) continue;
    Vec n = {d[1] / len, -d[0] / len};  // outward for counter-clockwise order
    total += len * nu(n);
  }
  return total;
}

}  // namespace percoflow
