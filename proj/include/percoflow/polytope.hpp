#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "percoflow/errors.hpp"
#include "percoflow/vec.hpp"

namespace percoflow {

// Closed halfspace {x : normal . x <= offset}. Normals are stored exactly as
// given; routines that need unit rows normalize internal copies.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

namespace detail {

// In-place Gaussian elimination with partial pivoting on a k x k system.
// Returns false when the matrix is numerically singular.
inline bool solve_linear(std::vector<double>& a, std::vector<double>& b, int k) {
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(a[r * k + col]) > std::abs(a[piv * k + col])) piv = r;
    if (std::abs(a[piv * k + col]) < 1e-12) return false;
    if (piv != col) {
      for (int c = 0; c < k; ++c) std::swap(a[col * k + c], a[piv * k + c]);
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < k; ++r) {
      double f = a[r * k + col] / a[col * k + col];
      if (f == 0.0) continue;
      for (int c = col; c < k; ++c) a[r * k + c] -= f * a[col * k + c];
      b[r] -= f * b[col];
    }
  }
  for (int col = k - 1; col >= 0; --col) {
    double s = b[col];
    for (int c = col + 1; c < k; ++c) s -= a[col * k + c] * b[c];
    b[col] = s / a[col * k + col];
  }
  return true;
}

// Visits every size-k index combination out of [0, m).
template <typename F>
inline void for_each_combination(int m, int k, F&& fn) {
  if (k > m || k < 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::vector<Halfspace> unit_rows(const std::vector<Halfspace>& hs) {
  std::vector<Halfspace> out;
  out.reserve(hs.size());
  for (const auto& h : hs) {
    double n = norm2(h.normal);
    if (n < 1e-14) {
      if (h.offset < -kGeomTol)
        throw GeometryError("halfspace with zero normal and negative offset");
      continue;  // vacuous constraint
    }
    out.push_back({scaled(h.normal, 1.0 / n), h.offset / n});
  }
  return out;
}

}  // namespace detail

struct LpSolution {
  Vec x;
  double value = 0.0;
};

// Minimizes c.x over {x : a_i.x <= b_i} by enumerating candidate bases.
// Exact (up to rounding) for the small systems this project deals with; the
// feasible region must be pointed and the optimum bounded, which holds for
// every call site here. Returns nullopt when no feasible basic point exists.
inline std::optional<LpSolution> lp_minimize(const Vec& c,
                                             const std::vector<Halfspace>& cons,
                                             double tol = kGeomTol) {
  const int k = static_cast<int>(c.size());
  auto rows = detail::unit_rows(cons);
  const int m = static_cast<int>(rows.size());
  std::optional<LpSolution> best;
  std::vector<double> a(k * k), b(k);
  detail::for_each_combination(m, k, [&](const std::vector<int>& idx) {
    for (int r = 0; r < k; ++r) {
      for (int cidx = 0; cidx < k; ++cidx) a[r * k + cidx] = rows[idx[r]].normal[cidx];
      b[r] = rows[idx[r]].offset;
    }
    if (!detail::solve_linear(a, b, k)) return;
    for (const auto& row : rows)
      if (dot(row.normal, b) > row.offset + tol) return;
    double v = dot(c, b);
    if (!best || v < best->value) best = LpSolution{b, v};
  });
  return best;
}

// min over x of max_i (a_i.x - b_i) with unit-normalized rows: negative inside
// (minus the Chebyshev radius), positive iff the system is infeasible.
inline double min_max_violation(const std::vector<Halfspace>& cons) {
  auto rows = detail::unit_rows(cons);
  if (rows.empty()) return -std::numeric_limits<double>::infinity();
  const int d = static_cast<int>(rows[0].normal.size());
  std::vector<Halfspace> aug;
  aug.reserve(rows.size());
  for (const auto& r : rows) {
    Vec n = r.normal;
    n.push_back(-1.0);
    aug.push_back({std::move(n), r.offset});
  }
  Vec c(d + 1, 0.0);
  c[d] = 1.0;
  auto sol = lp_minimize(c, aug);
  if (!sol) throw GeometryError("degenerate constraint system in feasibility check");
  return sol->value;
}

// Volume of the k-dimensional H-polytope {y : a_i.y <= b_i}. Recursive
// evaluation over facets: V = (1/k) sum_i b_i * H^{k-1}(facet_i) for unit
// rows, facets reduced one dimension at a time by pivot substitution.
// Throws when the polytope is unbounded; empty or degenerate inputs give 0.
inline double lasserre_volume(int k, const std::vector<Halfspace>& cons) {
  // normalize rows; a zero row is vacuous when its offset is nonnegative and
  // makes the whole set empty otherwise (a plane-parallel constraint that
  // excludes the slice)
  std::vector<Halfspace> rows;
  rows.reserve(cons.size());
  for (const auto& h : cons) {
    double n = norm2(h.normal);
    if (n < 1e-11) {
      if (h.offset < -kGeomTol) return 0.0;
      continue;
    }
    rows.push_back({scaled(h.normal, 1.0 / n), h.offset / n});
  }
  // drop duplicate rows: a facet listed twice would be counted twice
  {
    std::vector<Halfspace> dedup;
    for (const auto& r : rows) {
      bool seen = false;
      for (const auto& s : dedup)
        if (approx_eq(r.normal, s.normal, 1e-9) && std::abs(r.offset - s.offset) < 1e-9)
          seen = true;
      if (!seen) dedup.push_back(r);
    }
    rows.swap(dedup);
  }
  if (k == 0) {
    for (const auto& r : rows)
      if (r.offset < -kGeomTol) return 0.0;
    return 1.0;
  }
  if (k == 1) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      double a = r.normal[0];  // +-1 after normalization
      if (a > 0)
        hi = std::min(hi, r.offset / a);
      else
        lo = std::max(lo, r.offset / a);
    }
    if (!std::isfinite(hi) || !std::isfinite(lo)) {
      if (hi - lo <= 0) return 0.0;
      throw GeometryError("unbounded polytope in measure computation");
    }
    return std::max(0.0, hi - lo);
  }
  double vol = 0.0;
  const int m = static_cast<int>(rows.size());
  for (int i = 0; i < m; ++i) {
    const Vec& ai = rows[i].normal;
    int piv = 0;
    for (int j = 1; j < k; ++j)
      if (std::abs(ai[j]) > std::abs(ai[piv])) piv = j;
    const double apiv = ai[piv];
    // substitute y_piv from a_i.y = b_i into the remaining rows
    std::vector<Halfspace> sub;
    sub.reserve(m - 1);
    for (int r = 0; r < m; ++r) {
      if (r == i) continue;
      const Vec& ar = rows[r].normal;
      double f = ar[piv] / apiv;
      Vec n(k - 1);
      int c = 0;
      for (int j = 0; j < k; ++j) {
        if (j == piv) continue;
        n[c++] = ar[j] - f * ai[j];
      }
      sub.push_back({std::move(n), rows[r].offset - f * rows[i].offset});
    }
    double facet = lasserre_volume(k - 1, sub) / std::abs(apiv);
    vol += rows[i].offset * facet;
  }
  vol /= k;
  if (vol < 0.0) {
    if (vol < -1e-6) throw GeometryError("negative volume: inconsistent polytope");
    vol = 0.0;
  }
  return vol;
}

// Deterministic orthonormal basis of the hyperplane orthogonal to unit v.
inline std::vector<Vec> hyperplane_basis(const Vec& v) {
  const int d = static_cast<int>(v.size());
  std::vector<int> axes(d);
  for (int i = 0; i < d; ++i) axes[i] = i;
  std::stable_sort(axes.begin(), axes.end(),
                   [&](int a, int b) { return std::abs(v[a]) < std::abs(v[b]); });
  std::vector<Vec> basis;
  for (int ai : axes) {
    if (static_cast<int>(basis.size()) == d - 1) break;
    Vec w = unit_axis(d, ai);
    w = axpy(w, -dot(w, v), v);
    for (const auto& u : basis) w = axpy(w, -dot(w, u), u);
    double n = norm2(w);
    if (n > 1e-9) basis.push_back(scaled(w, 1.0 / n));
  }
  if (static_cast<int>(basis.size()) != d - 1)
    throw GeometryError("failed to build hyperplane basis");
  return basis;
}

// H^{d-1} measure of { x : n0.x = b0 } intersected with the given halfspaces.
// n0 need not be unit. The intersection must be bounded.
inline double measure_in_hyperplane(const Vec& n0, double b0,
                                    const std::vector<Halfspace>& cons) {
  const int d = static_cast<int>(n0.size());
  if (d < 2) throw GeometryError("measure_in_hyperplane needs d >= 2");
  Vec nu = normalized(n0);
  double bu = b0 / norm2(n0);
  Vec origin = scaled(nu, bu);
  auto basis = hyperplane_basis(nu);
  std::vector<Halfspace> reduced;
  reduced.reserve(cons.size());
  for (const auto& h : cons) {
    Vec a(d - 1);
    for (int j = 0; j < d - 1; ++j) a[j] = dot(h.normal, basis[j]);
    reduced.push_back({std::move(a), h.offset - dot(h.normal, origin)});
  }
  return lasserre_volume(d - 1, reduced);
}

// Bounded convex polytope in halfspace representation.
class ConvexPolytope {
 public:
  ConvexPolytope() = default;
  explicit ConvexPolytope(std::vector<Halfspace> halfspaces)
      : hs_(std::move(halfspaces)) {
    if (hs_.empty()) throw GeometryError("polytope needs at least one halfspace");
    dim_ = static_cast<int>(hs_[0].normal.size());
    for (const auto& h : hs_)
      if (static_cast<int>(h.normal.size()) != dim_)
        throw GeometryError("inconsistent halfspace dimensions");
    detect_axis_aligned();
  }

  static ConvexPolytope box(const Vec& lo, const Vec& hi) {
    const int d = static_cast<int>(lo.size());
    std::vector<Halfspace> hs;
    hs.reserve(2 * d);
    for (int i = 0; i < d; ++i) {
      hs.push_back({unit_axis(d, i), hi[i]});
      hs.push_back({scaled(unit_axis(d, i), -1.0), -lo[i]});
    }
    return ConvexPolytope(std::move(hs));
  }

  int dim() const { return dim_; }
  const std::vector<Halfspace>& halfspaces() const { return hs_; }

  bool contains(const Vec& x, double tol = kGeomTol) const {
    for (const auto& h : hs_) {
      double n = norm2(h.normal);
      if (dot(h.normal, x) > h.offset + tol * n) return false;
    }
    return true;
  }

  // x in the interior with the given clearance.
  bool strictly_contains(const Vec& x, double margin = kGeomTol) const {
    for (const auto& h : hs_) {
      double n = norm2(h.normal);
      if (dot(h.normal, x) >= h.offset - margin * n) return false;
    }
    return true;
  }

  // All basic feasible points: intersections of dim() facet hyperplanes that
  // satisfy every constraint. Deduplicated, lexicographically sorted.
  std::vector<Vec> vertices(double tol = kGeomTol) const {
    std::vector<Vec> verts;
    const int m = static_cast<int>(hs_.size());
    const int k = dim_;
    std::vector<double> a(k * k), b(k);
    detail::for_each_combination(m, k, [&](const std::vector<int>& idx) {
      for (int r = 0; r < k; ++r) {
        double n = norm2(hs_[idx[r]].normal);
        if (n < 1e-14) return;
        for (int c = 0; c < k; ++c) a[r * k + c] = hs_[idx[r]].normal[c] / n;
        b[r] = hs_[idx[r]].offset / n;
      }
      if (!detail::solve_linear(a, b, k)) return;
      if (!contains(b, tol)) return;
      for (const auto& v : verts)
        if (approx_eq(v, b, 1e-8)) return;
      verts.push_back(b);
    });
    std::sort(verts.begin(), verts.end());
    return verts;
  }

  // Bounding box via vertices of the intersection with a huge box; touching
  // that box means the polytope is unbounded.
  std::pair<Vec, Vec> bounding_box(double big = 1e7) const {
    auto clipped = clip_to_big_box(big);
    auto verts = clipped.vertices();
    if (verts.empty()) throw GeometryError("empty polytope has no bounding box");
    Vec lo(dim_, std::numeric_limits<double>::infinity());
    Vec hi(dim_, -std::numeric_limits<double>::infinity());
    for (const auto& v : verts) {
      for (int i = 0; i < dim_; ++i) {
        if (std::abs(v[i]) > big * 0.99)
          throw GeometryError("polytope is unbounded");
        lo[i] = std::min(lo[i], v[i]);
        hi[i] = std::max(hi[i], v[i]);
      }
    }
    return {lo, hi};
  }

  bool is_bounded(double big = 1e7) const {
    auto clipped = clip_to_big_box(big);
    for (const auto& v : clipped.vertices())
      for (int i = 0; i < dim_; ++i)
        if (std::abs(v[i]) > big * 0.99) return false;
    return true;
  }

  bool is_empty() const { return min_max_violation(hs_) > kGeomTol; }

  // Per-axis intervals when every facet normal is axis-aligned.
  const std::optional<std::vector<std::pair<double, double>>>& axis_intervals() const {
    return axis_intervals_;
  }

 private:
  ConvexPolytope clip_to_big_box(double big) const {
    Vec lo(dim_, -big), hi(dim_, big);
    auto boxed = box(lo, hi);
    std::vector<Halfspace> all = hs_;
    all.insert(all.end(), boxed.halfspaces().begin(), boxed.halfspaces().end());
    return ConvexPolytope(std::move(all));
  }

  void detect_axis_aligned() {
    std::vector<std::pair<double, double>> iv(
        dim_, {-std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity()});
    for (const auto& h : hs_) {
      int nz = -1;
      double mx = norm_inf(h.normal);
      if (mx < 1e-14) return;
      for (int j = 0; j < dim_; ++j) {
        if (std::abs(h.normal[j]) > 1e-12 * mx) {
          if (nz >= 0) return;  // more than one component: not axis-aligned
          nz = j;
        }
      }
      double a = h.normal[nz];
      if (a > 0)
        iv[nz].second = std::min(iv[nz].second, h.offset / a);
      else
        iv[nz].first = std::max(iv[nz].first, h.offset / a);
    }
    axis_intervals_ = std::move(iv);
  }

  std::vector<Halfspace> hs_;
  int dim_ = 0;
  std::optional<std::vector<std::pair<double, double>>> axis_intervals_;
};

// Exact Euclidean point-to-polytope distance: project onto each active-set
// affine subspace and keep the nearest feasible projection.
inline double dist_l2(const Vec& p, const ConvexPolytope& poly) {
  if (poly.contains(p)) return 0.0;
  if (poly.axis_intervals()) {
    double s = 0.0;
    const auto& iv = *poly.axis_intervals();
    for (std::size_t i = 0; i < iv.size(); ++i) {
      double g = std::max({iv[i].first - p[i], p[i] - iv[i].second, 0.0});
      s += g * g;
    }
    return std::sqrt(s);
  }
  auto rows = detail::unit_rows(poly.halfspaces());
  const int d = poly.dim();
  const int m = static_cast<int>(rows.size());
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= d; ++k) {
    std::vector<double> gram(k * k), rhs(k);
    detail::for_each_combination(m, k, [&](const std::vector<int>& idx) {
      for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c)
          gram[r * k + c] = dot(rows[idx[r]].normal, rows[idx[c]].normal);
        rhs[r] = dot(rows[idx[r]].normal, p) - rows[idx[r]].offset;
      }
      if (!detail::solve_linear(gram, rhs, k)) return;
      Vec x = p;
      for (int r = 0; r < k; ++r) x = axpy(x, -rhs[r], rows[idx[r]].normal);
      for (const auto& row : rows)
        if (dot(row.normal, x) > row.offset + kGeomTol) return;
      best = std::min(best, norm2(sub(x, p)));
    });
  }
  if (!std::isfinite(best)) throw GeometryError("distance to empty polytope");
  return best;
}

// Exact L-infinity point-to-polytope distance via the small LP
// min r s.t. x in P, |x_i - p_i| <= r.
inline double dist_linf(const Vec& p, const ConvexPolytope& poly) {
  if (poly.contains(p)) return 0.0;
  if (poly.axis_intervals()) {
    double g = 0.0;
    const auto& iv = *poly.axis_intervals();
    for (std::size_t i = 0; i < iv.size(); ++i)
      g = std::max({g, iv[i].first - p[i], p[i] - iv[i].second});
    return g;
  }
  const int d = poly.dim();
  std::vector<Halfspace> cons;
  cons.reserve(poly.halfspaces().size() + 2 * d);
  for (const auto& h : poly.halfspaces()) {
    Vec n = h.normal;
    n.push_back(0.0);
    cons.push_back({std::move(n), h.offset});
  }
  for (int i = 0; i < d; ++i) {
    Vec n1(d + 1, 0.0), n2(d + 1, 0.0);
    n1[i] = 1.0;
    n1[d] = -1.0;
    n2[i] = -1.0;
    n2[d] = -1.0;
    cons.push_back({std::move(n1), p[i]});
    cons.push_back({std::move(n2), -p[i]});
  }
  Vec c(d + 1, 0.0);
  c[d] = 1.0;
  auto sol = lp_minimize(c, cons);
  if (!sol) throw GeometryError("distance to empty polytope");
  return std::max(0.0, sol->value);
}

}  // namespace percoflow
