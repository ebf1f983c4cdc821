#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "percoflow/errors.hpp"
#include "percoflow/polytope.hpp"
#include "percoflow/vec.hpp"

namespace percoflow {

// A facet of one domain piece, optionally restricted to a sub-region of the
// facet hyperplane. The patch is the part of the boundary where fluid enters
// or leaves.
struct BoundaryPatch {
  int piece = 0;
  int facet = 0;
  std::optional<ConvexPolytope> region;
};

namespace detail {

inline ConvexPolytope patch_polytope(const ConvexPolytope& piece,
                                     const BoundaryPatch& patch) {
  std::vector<Halfspace> hs = piece.halfspaces();
  const Halfspace& f = hs.at(patch.facet);
  hs.push_back({scaled(f.normal, -1.0), -f.offset});  // pin to the facet plane
  if (patch.region)
    for (const auto& h : patch.region->halfspaces()) hs.push_back(h);
  return ConvexPolytope(std::move(hs));
}

}  // namespace detail

// (d-1)-measure of one facet of a polytope, optionally clipped by a further
// convex restriction. Degenerate facets measure 0.
inline double hd_measure_facet(const ConvexPolytope& poly, int facet,
                               const ConvexPolytope* restriction = nullptr) {
  const auto& hs = poly.halfspaces();
  const Halfspace& f = hs.at(facet);
  std::vector<Halfspace> cons;
  cons.reserve(hs.size() + (restriction ? restriction->halfspaces().size() : 0));
  for (int i = 0; i < static_cast<int>(hs.size()); ++i)
    if (i != facet) cons.push_back(hs[i]);
  if (restriction)
    for (const auto& h : restriction->halfspaces()) cons.push_back(h);
  return measure_in_hyperplane(f.normal, f.offset, cons);
}

// Open bounded domain given as the interior of a finite union of convex
// polytopes, with two marked families of boundary patches.
class Domain {
 public:
  Domain(std::vector<ConvexPolytope> pieces, std::vector<BoundaryPatch> gamma1,
         std::vector<BoundaryPatch> gamma2)
      : pieces_(std::move(pieces)),
        gamma1_(std::move(gamma1)),
        gamma2_(std::move(gamma2)) {
    if (pieces_.empty()) throw GeometryError("domain needs at least one piece");
    dim_ = pieces_[0].dim();
    if (dim_ < 2) throw GeometryError("domain dimension must be >= 2");
    for (const auto& p : pieces_) {
      if (p.dim() != dim_) throw GeometryError("domain pieces of mixed dimension");
      if (!p.is_bounded()) throw GeometryError("domain piece is unbounded");
      if (min_max_violation(p.halfspaces()) > -kGeomTol)
        throw GeometryError("domain piece has empty interior");
    }
    for (const auto* g : {&gamma1_, &gamma2_})
      for (const auto& patch : *g) {
        if (patch.piece < 0 || patch.piece >= static_cast<int>(pieces_.size()))
          throw GeometryError("patch references missing piece");
        const auto& hs = pieces_[patch.piece].halfspaces();
        if (patch.facet < 0 || patch.facet >= static_cast<int>(hs.size()))
          throw GeometryError("patch references missing facet");
      }
    for (const auto& patch : gamma1_) gamma1_polys_.push_back(make_patch(patch));
    for (const auto& patch : gamma2_) gamma2_polys_.push_back(make_patch(patch));
    // the patches must be separated: flow between touching patches is
    // dominated by a bounded neighbourhood of the contact and the scaling
    // breaks down
    for (const auto& p1 : gamma1_polys_)
      for (const auto& p2 : gamma2_polys_) {
        std::vector<Halfspace> joint = p1.halfspaces();
        joint.insert(joint.end(), p2.halfspaces().begin(), p2.halfspaces().end());
        if (min_max_violation(joint) <= kGeomTol)
          throw GeometryError("gamma1 and gamma2 are not separated");
      }
    compute_bbox();
  }

  int dim() const { return dim_; }
  const std::vector<ConvexPolytope>& pieces() const { return pieces_; }
  const std::vector<BoundaryPatch>& gamma1() const { return gamma1_; }
  const std::vector<BoundaryPatch>& gamma2() const { return gamma2_; }
  const std::vector<ConvexPolytope>& gamma1_polytopes() const { return gamma1_polys_; }
  const std::vector<ConvexPolytope>& gamma2_polytopes() const { return gamma2_polys_; }
  const std::pair<Vec, Vec>& bounding_box() const { return bbox_; }

  // membership in the closure of the domain
  bool contains(const Vec& x, double tol = kGeomTol) const {
    for (const auto& p : pieces_)
      if (p.contains(x, tol)) return true;
    return false;
  }

  // Membership in the open domain: strictly inside one piece, or on a facet
  // plane shared by two pieces glued along it (the standard union topology).
  bool interior_contains(const Vec& x) const {
    std::vector<int> holders;
    for (int i = 0; i < static_cast<int>(pieces_.size()); ++i) {
      if (pieces_[i].strictly_contains(x)) return true;
      if (pieces_[i].contains(x)) holders.push_back(i);
    }
    for (std::size_t a = 0; a < holders.size(); ++a)
      for (std::size_t b = a + 1; b < holders.size(); ++b)
        if (glued_pair_covers(x, pieces_[holders[a]], pieces_[holders[b]]))
          return true;
    return false;
  }

  double dist_linf(const Vec& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_) best = std::min(best, percoflow::dist_linf(x, p));
    return best;
  }

  double dist_l2(const Vec& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_) best = std::min(best, percoflow::dist_l2(x, p));
    return best;
  }

  // L-infinity distance to the patch family gamma^i (i = 1 or 2)
  double gamma_dist_linf(const Vec& x, int which) const {
    const auto& polys = (which == 1) ? gamma1_polys_ : gamma2_polys_;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : polys) best = std::min(best, percoflow::dist_linf(x, p));
    return best;
  }

 private:
  ConvexPolytope make_patch(const BoundaryPatch& patch) const {
    auto poly = detail::patch_polytope(pieces_[patch.piece], patch);
    const Halfspace& f = pieces_[patch.piece].halfspaces()[patch.facet];
    std::vector<Halfspace> cons;
    const auto& hs = pieces_[patch.piece].halfspaces();
    for (int i = 0; i < static_cast<int>(hs.size()); ++i)
      if (i != patch.facet) cons.push_back(hs[i]);
    if (patch.region)
      for (const auto& h : patch.region->halfspaces()) cons.push_back(h);
    if (measure_in_hyperplane(f.normal, f.offset, cons) <= kGeomTol)
      throw GeometryError("boundary patch has empty relative interior");
    return poly;
  }

  // True when x lies on a common facet plane of p and q with opposite
  // orientations and is otherwise strictly inside both: p and q together
  // cover a neighbourhood of x.
  bool glued_pair_covers(const Vec& x, const ConvexPolytope& p,
                         const ConvexPolytope& q) const {
    auto active_plane = [&](const ConvexPolytope& poly, Vec& n_out,
                            double& b_out) -> bool {
      int active = -1;
      for (int i = 0; i < static_cast<int>(poly.halfspaces().size()); ++i) {
        const auto& h = poly.halfspaces()[i];
        double nn = norm2(h.normal);
        double s = (dot(h.normal, x) - h.offset) / nn;
        if (std::abs(s) <= kGeomTol) {
          if (active >= 0) return false;  // corner: more than one active facet
          active = i;
        } else if (s > 0) {
          return false;
        }
      }
      if (active < 0) return false;
      const auto& h = poly.halfspaces()[active];
      double nn = norm2(h.normal);
      n_out = scaled(h.normal, 1.0 / nn);
      b_out = h.offset / nn;
      return true;
    };
    Vec np, nq;
    double bp, bq;
    if (!active_plane(p, np, bp) || !active_plane(q, nq, bq)) return false;
    return approx_eq(np, scaled(nq, -1.0), 1e-9) && std::abs(bp + bq) <= 1e-9;
  }

  void compute_bbox() {
    Vec lo(dim_, std::numeric_limits<double>::infinity());
    Vec hi(dim_, -std::numeric_limits<double>::infinity());
    for (const auto& p : pieces_) {
      auto [plo, phi] = p.bounding_box();
      for (int i = 0; i < dim_; ++i) {
        lo[i] = std::min(lo[i], plo[i]);
        hi[i] = std::max(hi[i], phi[i]);
      }
    }
    bbox_ = {lo, hi};
  }

  std::vector<ConvexPolytope> pieces_;
  std::vector<BoundaryPatch> gamma1_, gamma2_;
  std::vector<ConvexPolytope> gamma1_polys_, gamma2_polys_;
  std::pair<Vec, Vec> bbox_;
  int dim_ = 0;
};

// Open segment (p,q) inside a closed convex region: by convexity this is just
// containment of both endpoints.
inline bool edge_in_set(const Vec& p, const Vec& q, const ConvexPolytope& region) {
  return region.contains(p) && region.contains(q);
}

// Open segment (p,q) inside the open domain. The segment is subdivided at
// every facet-plane crossing; each piece midpoint and each interior
// breakpoint must lie in the interior of the union.
inline bool edge_in_set(const Vec& p, const Vec& q, const Domain& dom) {
  std::vector<double> ts = {0.0, 1.0};
  for (const auto& piece : dom.pieces()) {
    for (const auto& h : piece.halfspaces()) {
      double nn = norm2(h.normal);
      double sp = (dot(h.normal, p) - h.offset) / nn;
      double sq = (dot(h.normal, q) - h.offset) / nn;
      if ((sp < -kGeomTol && sq > kGeomTol) || (sp > kGeomTol && sq < -kGeomTol)) {
        double t = sp / (sp - sq);
        if (t > 1e-12 && t < 1.0 - 1e-12) ts.push_back(t);
      }
    }
  }
  std::sort(ts.begin(), ts.end());
  Vec dir = sub(q, p);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i + 1] - ts[i] < 1e-12) continue;
    double tm = 0.5 * (ts[i] + ts[i + 1]);
    if (!dom.interior_contains(axpy(p, tm, dir))) return false;
    if (i > 0 && !dom.interior_contains(axpy(p, ts[i], dir))) return false;
  }
  return true;
}

inline double dist_linf(const Vec& x, const Domain& dom) { return dom.dist_linf(x); }
inline double dist_l2(const Vec& x, const Domain& dom) { return dom.dist_l2(x); }

// The cylinder cyl(A, h) = { x + t v : x in A, |t| <= h } over a flat
// (d-1)-dimensional base A orthogonal to the unit vector v. The base is kept
// as halfspaces in the coordinates of an orthonormal frame of hyp(A).
struct CylinderSpec {
  Vec center;
  Vec normal;
  double half_height = 0.0;
  std::vector<Vec> frame;             // d-1 orthonormal vectors spanning hyp(A)
  std::vector<Halfspace> base_cons;   // base in frame coordinates
  double base_measure = 0.0;          // H^{d-1}(A)
  ConvexPolytope body;

  int dim() const { return static_cast<int>(center.size()); }
  // signed height of x above hyp(A)
  double height(const Vec& x) const { return dot(normal, sub(x, center)); }
  double top_offset() const { return dot(normal, center) + half_height; }
  double bottom_offset() const { return dot(normal, center) - half_height; }
};

namespace detail {

inline CylinderSpec finish_cylinder(Vec center, Vec v, double h,
                                    std::vector<Vec> frame,
                                    std::vector<Halfspace> base_cons) {
  const int d = static_cast<int>(center.size());
  std::vector<Halfspace> hs;
  for (const auto& bc : base_cons) {
    Vec n(d, 0.0);
    for (int j = 0; j < d - 1; ++j) n = axpy(n, bc.normal[j], frame[j]);
    double off = bc.offset + dot(n, center);
    hs.push_back({std::move(n), off});
  }
  hs.push_back({v, dot(v, center) + h});
  hs.push_back({scaled(v, -1.0), -(dot(v, center) - h)});
  CylinderSpec spec;
  spec.center = std::move(center);
  spec.normal = std::move(v);
  spec.half_height = h;
  spec.frame = std::move(frame);
  spec.base_measure = lasserre_volume(d - 1, base_cons);
  spec.base_cons = std::move(base_cons);
  if (spec.base_measure <= kGeomTol)
    throw GeometryError("degenerate cylinder base");
  spec.body = ConvexPolytope(std::move(hs));
  return spec;
}

}  // namespace detail

// Hyperrectangle base given by explicit axes and half-extents. The axes must
// be pairwise orthogonal unit vectors orthogonal to v (tolerance 1e-9).
inline CylinderSpec make_cylinder(const Vec& center, const std::vector<Vec>& axes,
                                  const std::vector<double>& half_extents,
                                  double h, const Vec& v) {
  const int d = static_cast<int>(center.size());
  if (h <= 0.0) throw GeometryError("cylinder height must be positive");
  if (!is_unit(v, 1e-9)) throw GeometryError("cylinder axis must be a unit vector");
  if (static_cast<int>(axes.size()) != d - 1 || half_extents.size() != axes.size())
    throw GeometryError("cylinder base needs d-1 axes and extents");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (!is_unit(axes[i], 1e-9)) throw GeometryError("base axis must be unit");
    if (std::abs(dot(axes[i], v)) > 1e-9)
      throw GeometryError("cylinder axis not orthogonal to base");
    if (half_extents[i] <= 0.0) throw GeometryError("degenerate cylinder base");
    for (std::size_t j = i + 1; j < axes.size(); ++j)
      if (std::abs(dot(axes[i], axes[j])) > 1e-9)
        throw GeometryError("base axes must be orthogonal");
  }
  std::vector<Halfspace> base;
  for (int j = 0; j < d - 1; ++j) {
    base.push_back({unit_axis(d - 1, j), half_extents[j]});
    base.push_back({scaled(unit_axis(d - 1, j), -1.0), half_extents[j]});
  }
  return detail::finish_cylinder(center, v, h, axes, std::move(base));
}

// Square (hypercube) base of side `base_size` centered at `center`, frame
// chosen deterministically from v.
inline CylinderSpec make_cylinder_square(const Vec& center, double base_size,
                                         double h, const Vec& v) {
  if (base_size <= 0.0) throw GeometryError("degenerate cylinder base");
  auto frame = hyperplane_basis(normalized(v));
  std::vector<double> ext(frame.size(), base_size / 2.0);
  return make_cylinder(center, frame, ext, h, normalized(v));
}

// Disc base, realized as the inscribed regular polygon with `segments` sides
// (d = 3; in d = 2 a disc degenerates to a segment, use a rectangle base).
inline CylinderSpec make_cylinder_disc(const Vec& center, double radius, double h,
                                       const Vec& v, int segments = 32) {
  const int d = static_cast<int>(center.size());
  if (d != 3) throw GeometryError("disc base is only meaningful in d = 3");
  if (radius <= 0.0) throw GeometryError("degenerate cylinder base");
  if (segments < 3) throw GeometryError("disc needs at least 3 segments");
  if (h <= 0.0) throw GeometryError("cylinder height must be positive");
  if (!is_unit(v, 1e-9)) throw GeometryError("cylinder axis must be a unit vector");
  auto frame = hyperplane_basis(normalized(v));
  std::vector<Halfspace> base;
  const double apothem = radius * std::cos(M_PI / segments);
  for (int s = 0; s < segments; ++s) {
    double ang = 2.0 * M_PI * (s + 0.5) / segments;
    base.push_back({{std::cos(ang), std::sin(ang)}, apothem});
  }
  return detail::finish_cylinder(center, normalized(v), h, frame, std::move(base));
}

}  // namespace percoflow
