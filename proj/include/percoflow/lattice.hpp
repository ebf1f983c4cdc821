#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "percoflow/errors.hpp"
#include "percoflow/geometry.hpp"

namespace percoflow {

// Undirected nearest-neighbour edge; v is the neighbour of u in direction
// +e_axis, so u < v lexicographically and the (u, axis) order is canonical.
struct LatticeEdge {
  uint32_t u = 0;
  uint32_t v = 0;
  uint8_t axis = 0;
};

// The graph Z^d/n restricted to a region: vertices as integer coordinates k
// (physical position k/n), nearest-neighbour edges, and marked vertex sets.
// Immutable after construction.
class Lattice {
 public:
  Lattice(int dim, int n, std::vector<int32_t> coords, std::vector<LatticeEdge> edges,
          std::vector<uint32_t> gamma, std::vector<uint32_t> gamma1,
          std::vector<uint32_t> gamma2)
      : dim_(dim),
        n_(n),
        coords_(std::move(coords)),
        edges_(std::move(edges)),
        gamma_(std::move(gamma)),
        gamma1_(std::move(gamma1)),
        gamma2_(std::move(gamma2)) {}

  int dim() const { return dim_; }
  int mesh() const { return n_; }
  std::size_t vertex_count() const { return coords_.size() / dim_; }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const int32_t> vertex(uint32_t i) const {
    return {coords_.data() + static_cast<std::size_t>(i) * dim_,
            static_cast<std::size_t>(dim_)};
  }

  Vec position(uint32_t i) const {
    auto k = vertex(i);
    Vec x(dim_);
    for (int j = 0; j < dim_; ++j) x[j] = static_cast<double>(k[j]) / n_;
    return x;
  }

  const std::vector<LatticeEdge>& edges() const { return edges_; }
  const std::vector<uint32_t>& gamma_n() const { return gamma_; }
  const std::vector<uint32_t>& gamma1_n() const { return gamma1_; }
  const std::vector<uint32_t>& gamma2_n() const { return gamma2_; }

  // Index of the vertex with the given integer coordinates, or -1. Vertices
  // are stored in lexicographic order, so this is a binary search.
  int64_t find(std::span<const int32_t> k) const {
    std::size_t lo = 0, hi = vertex_count();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      int cmp = compare(vertex(static_cast<uint32_t>(mid)), k);
      if (cmp < 0)
        lo = mid + 1;
      else if (cmp > 0)
        hi = mid;
      else
        return static_cast<int64_t>(mid);
    }
    return -1;
  }

  // CSR adjacency over the undirected edges: (offsets, edge indices).
  std::pair<std::vector<uint32_t>, std::vector<uint32_t>> adjacency() const {
    std::vector<uint32_t> deg(vertex_count() + 1, 0);
    for (const auto& e : edges_) {
      ++deg[e.u + 1];
      ++deg[e.v + 1];
    }
    for (std::size_t i = 1; i < deg.size(); ++i) deg[i] += deg[i - 1];
    std::vector<uint32_t> inc(edges_.size() * 2);
    std::vector<uint32_t> fill(deg.begin(), deg.end() - 1);
    for (uint32_t ei = 0; ei < edges_.size(); ++ei) {
      inc[fill[edges_[ei].u]++] = ei;
      inc[fill[edges_[ei].v]++] = ei;
    }
    return {std::move(deg), std::move(inc)};
  }

  bool is_connected() const {
    if (vertex_count() == 0) return true;
    auto [off, inc] = adjacency();
    std::vector<char> seen(vertex_count(), 0);
    std::queue<uint32_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t visited = 1;
    while (!q.empty()) {
      uint32_t u = q.front();
      q.pop();
      for (uint32_t i = off[u]; i < off[u + 1]; ++i) {
        const auto& e = edges_[inc[i]];
        uint32_t w = (e.u == u) ? e.v : e.u;
        if (!seen[w]) {
          seen[w] = 1;
          ++visited;
          q.push(w);
        }
      }
    }
    return visited == vertex_count();
  }

 private:
  static int compare(std::span<const int32_t> a, std::span<const int32_t> b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return -1;
      if (a[i] > b[i]) return 1;
    }
    return 0;
  }

  int dim_;
  int n_;
  std::vector<int32_t> coords_;
  std::vector<LatticeEdge> edges_;
  std::vector<uint32_t> gamma_, gamma1_, gamma2_;
};

namespace detail {

// Lexicographic scan of the integer box [lo, hi], keeping points accepted by
// the predicate. Returns flat coordinates in scan (= lexicographic) order.
template <typename Pred>
inline std::vector<int32_t> scan_box(const std::vector<int32_t>& lo,
                                     const std::vector<int32_t>& hi, Pred&& accept) {
  const int d = static_cast<int>(lo.size());
  std::vector<int32_t> coords;
  std::vector<int32_t> k(lo.begin(), lo.end());
  for (int i = 0; i < d; ++i)
    if (lo[i] > hi[i]) return coords;
  while (true) {
    if (accept(std::span<const int32_t>(k.data(), d)))
      coords.insert(coords.end(), k.begin(), k.end());
    int axis = d - 1;
    while (axis >= 0 && k[axis] == hi[axis]) {
      k[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
    ++k[axis];
  }
  return coords;
}

inline std::vector<LatticeEdge> nearest_neighbour_edges(const Lattice& lat) {
  const int d = lat.dim();
  std::vector<LatticeEdge> edges;
  std::vector<int32_t> nb(d);
  for (uint32_t u = 0; u < lat.vertex_count(); ++u) {
    auto k = lat.vertex(u);
    for (int a = 0; a < d; ++a) {
      for (int i = 0; i < d; ++i) nb[i] = k[i];
      ++nb[a];
      int64_t v = lat.find(nb);
      if (v >= 0)
        edges.push_back({u, static_cast<uint32_t>(v), static_cast<uint8_t>(a)});
    }
  }
  return edges;  // ordered by (u, axis) by construction
}

}  // namespace detail

// Builds the discrete model of the domain at mesh 1/n:
//   Omega_n = { x in Z^d/n : d_inf(x, Omega) < 1/n }
//   Gamma_n = vertices of Omega_n with an integer neighbour outside Omega_n
//   Gamma^i_n = { x in Gamma_n : d_inf(x,Gamma^i) < 1/n, d_inf(x,Gamma^{3-i}) >= 1/n }
inline Lattice discretize(const Domain& dom, int n) {
  if (n < 1) throw ConfigError("mesh parameter n must be >= 1");
  const int d = dom.dim();
  const double thresh = 1.0 / n - kGeomTol;
  const auto& [blo, bhi] = dom.bounding_box();
  std::vector<int32_t> lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    // the scan box covers every point with d_inf < 1/n, so membership in
    // Omega_n later reduces to lookup in the stored vertex list
    lo[i] = static_cast<int32_t>(std::ceil(n * blo[i] - 1.0 - 1e-9));
    hi[i] = static_cast<int32_t>(std::floor(n * bhi[i] + 1.0 + 1e-9));
  }
  auto in_omega_n = [&](std::span<const int32_t> k) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = static_cast<double>(k[i]) / n;
    if (dom.contains(x)) return true;
    return dom.dist_linf(x) < thresh;
  };
  auto coords = detail::scan_box(lo, hi, in_omega_n);
  if (coords.empty()) throw GeometryError("mesh too coarse: empty discretization");

  Lattice stage(d, n, coords, {}, {}, {}, {});
  auto edges = detail::nearest_neighbour_edges(stage);

  std::vector<uint32_t> gamma, gamma1, gamma2;
  std::vector<int32_t> nb(d);
  for (uint32_t u = 0; u < stage.vertex_count(); ++u) {
    auto k = stage.vertex(u);
    bool boundary = false;
    for (int a = 0; a < d && !boundary; ++a) {
      for (int s : {-1, +1}) {
        for (int i = 0; i < d; ++i) nb[i] = k[i];
        nb[a] += s;
        if (stage.find(nb) < 0) {
          boundary = true;
          break;
        }
      }
    }
    if (!boundary) continue;
    gamma.push_back(u);
    Vec x = stage.position(u);
    double d1 = dom.gamma_dist_linf(x, 1);
    double d2 = dom.gamma_dist_linf(x, 2);
    if (d1 < thresh && d2 >= thresh) gamma1.push_back(u);
    if (d2 < thresh && d1 >= thresh) gamma2.push_back(u);
  }
  if (gamma1.empty())
    throw GeometryError("mesh too coarse: discrete boundary patch gamma1 is empty");
  if (gamma2.empty())
    throw GeometryError("mesh too coarse: discrete boundary patch gamma2 is empty");

  return Lattice(d, n, std::move(coords), std::move(edges), std::move(gamma),
                 std::move(gamma1), std::move(gamma2));
}

// Signed permutation with translation acting on integer lattice coordinates:
// k'_i = sign[i] * k[perm[i]] + offset[i].
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<int> sign;
  std::vector<int32_t> offset;

  static SignedPermutation identity(int d) {
    SignedPermutation s;
    s.perm.resize(d);
    s.sign.assign(d, 1);
    s.offset.assign(d, 0);
    for (int i = 0; i < d; ++i) s.perm[i] = i;
    return s;
  }

  void apply(std::span<const int32_t> k, std::vector<int32_t>& out) const {
    for (std::size_t i = 0; i < perm.size(); ++i)
      out[i] = sign[i] * k[perm[i]] + offset[i];
  }
};

// Relabels the lattice through a symmetry of the underlying region. The
// symmetry must map the vertex set onto itself and the two marked patch sets
// onto themselves or onto each other.
inline Lattice automorphism_apply(const Lattice& lat, const SignedPermutation& sym) {
  const int d = lat.dim();
  if (static_cast<int>(sym.perm.size()) != d ||
      static_cast<int>(sym.sign.size()) != d ||
      static_cast<int>(sym.offset.size()) != d)
    throw ConfigError("signed permutation has wrong dimension");
  {
    std::vector<char> hit(d, 0);
    for (int i = 0; i < d; ++i) {
      if (sym.perm[i] < 0 || sym.perm[i] >= d || hit[sym.perm[i]])
        throw ConfigError("invalid permutation");
      hit[sym.perm[i]] = 1;
      if (sym.sign[i] != 1 && sym.sign[i] != -1)
        throw ConfigError("signs must be +-1");
    }
  }
  std::vector<uint32_t> image(lat.vertex_count());
  std::vector<int32_t> mapped(d);
  for (uint32_t u = 0; u < lat.vertex_count(); ++u) {
    sym.apply(lat.vertex(u), mapped);
    int64_t w = lat.find(mapped);
    if (w < 0)
      throw GeometryError("automorphism does not preserve the vertex set");
    image[u] = static_cast<uint32_t>(w);
  }
  // new axis of an old +e_a step: the axis b with perm[b] == a
  std::vector<int> axis_image(d);
  for (int b = 0; b < d; ++b) axis_image[sym.perm[b]] = b;

  std::vector<LatticeEdge> edges;
  edges.reserve(lat.edge_count());
  for (const auto& e : lat.edges()) {
    int b = axis_image[e.axis];
    uint32_t nu = image[e.u], nv = image[e.v];
    if (sym.sign[b] < 0) std::swap(nu, nv);
    edges.push_back({nu, nv, static_cast<uint8_t>(b)});
  }
  std::sort(edges.begin(), edges.end(), [](const LatticeEdge& a, const LatticeEdge& b) {
    return a.u != b.u ? a.u < b.u : a.axis < b.axis;
  });

  auto map_sorted = [&](const std::vector<uint32_t>& in) {
    std::vector<uint32_t> out;
    out.reserve(in.size());
    for (uint32_t u : in) out.push_back(image[u]);
    std::sort(out.begin(), out.end());
    return out;
  };
  auto gamma = map_sorted(lat.gamma_n());
  auto g1 = map_sorted(lat.gamma1_n());
  auto g2 = map_sorted(lat.gamma2_n());
  auto sorted = [](std::vector<uint32_t> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  auto old1 = sorted(lat.gamma1_n());
  auto old2 = sorted(lat.gamma2_n());
  bool preserved = (g1 == old1 && g2 == old2);
  bool swapped = (g1 == old2 && g2 == old1);
  if (gamma != sorted(lat.gamma_n()) || (!preserved && !swapped))
    throw GeometryError("automorphism does not preserve the boundary patches");

  return Lattice(d, lat.mesh(),
                 std::vector<int32_t>(lat.vertex(0).data(),
                                      lat.vertex(0).data() + lat.vertex_count() * d),
                 std::move(edges), std::move(gamma), std::move(g1), std::move(g2));
}

}  // namespace percoflow
