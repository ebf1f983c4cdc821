#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "percoflow/capacity.hpp"
#include "percoflow/errors.hpp"
#include "percoflow/lattice.hpp"

namespace percoflow {

// A feasible stream: per-edge throughput g(e) with the orientation the fluid
// takes. Orientation of edge e is u -> v when toward_v[e] != 0.
struct Stream {
  std::vector<Cap> g;
  std::vector<uint8_t> toward_v;
};

// A set of edges separating F1 from F2, together with the set of vertices on
// the F1 side of the separation.
struct Cut {
  std::vector<uint32_t> edges;
  std::vector<uint32_t> source_side;
};

struct FlowResult {
  Cap value = 0;
  Stream stream;
  Cut cut;
  Cap cut_capacity = 0;
};

enum class FlowAlgorithm { PushRelabel, BfsAugmenting };

namespace detail {

// Residual network over the lattice plus auxiliary terminals. Lattice edge e
// becomes the arc pair (2e, 2e+1), each with residual t(e); the pair of arc a
// is a^1. Terminal arcs carry 1 + sum of all real capacities, a finite bound
// no minimal cut can saturate.
class FlowNetwork {
 public:
  FlowNetwork(const Lattice& lat, const CapacityAssignment& caps,
              std::span<const uint32_t> f1, std::span<const uint32_t> f2)
      : nv_(lat.vertex_count() + 2),
        source_(static_cast<uint32_t>(lat.vertex_count())),
        sink_(static_cast<uint32_t>(lat.vertex_count() + 1)),
        n_real_(lat.edge_count()) {
    if (f1.empty() || f2.empty())
      throw ConfigError("max flow needs nonempty terminal sets");
    std::vector<char> mark(lat.vertex_count(), 0);
    for (uint32_t u : f1) {
      if (u >= lat.vertex_count()) throw ConfigError("terminal vertex out of range");
      mark[u] = 1;
    }
    for (uint32_t u : f2) {
      if (u >= lat.vertex_count()) throw ConfigError("terminal vertex out of range");
      if (mark[u]) throw ConfigError("terminal sets F1 and F2 intersect");
      mark[u] = 2;
    }
    Cap inf = 1;
    for (Cap c : caps.values()) inf += c;
    inf_ = inf;

    const std::size_t na = 2 * n_real_ + 2 * (f1.size() + f2.size());
    to_.resize(na);
    res_.resize(na);
    const auto& edges = lat.edges();
    for (std::size_t e = 0; e < n_real_; ++e) {
      to_[2 * e] = edges[e].v;
      to_[2 * e + 1] = edges[e].u;
      res_[2 * e] = caps.value(e);
      res_[2 * e + 1] = caps.value(e);
    }
    std::size_t a = 2 * n_real_;
    for (uint32_t u : f1) {
      to_[a] = u;
      res_[a] = inf;  // source -> u
      to_[a + 1] = source_;
      res_[a + 1] = 0;
      a += 2;
    }
    for (uint32_t u : f2) {
      to_[a] = sink_;
      res_[a] = inf;  // u -> sink
      to_[a + 1] = u;
      res_[a + 1] = 0;
      a += 2;
    }
    build_adjacency(lat, f1, f2);
  }

  uint32_t source() const { return source_; }
  uint32_t sink() const { return sink_; }
  uint32_t vertex_count() const { return nv_; }
  std::size_t real_edge_count() const { return n_real_; }
  Cap residual(std::size_t arc) const { return res_[arc]; }

  // Net throughput of real edge e in the canonical u -> v direction.
  Cap net_flow(std::size_t e) const { return (res_[2 * e + 1] - res_[2 * e]) / 2; }

  void solve_push_relabel() {
    const uint32_t n = nv_;
    height_.assign(n, 0);
    excess_.assign(n, 0);
    cur_.assign(n, 0);
    count_.assign(2 * n + 2, 0);
    buckets_.assign(2 * n + 2, {});
    relabel_credit_ = n;
    global_relabel();
    height_[source_] = n;
    for (uint32_t a = off_[source_]; a < off_[source_ + 1]; ++a) {
      std::size_t arc = adj_[a];
      Cap d = res_[arc];
      if (d <= 0) continue;
      res_[arc] -= d;
      res_[arc ^ 1] += d;
      excess_[to_[arc]] += d;
      excess_[source_] -= d;
      activate(to_[arc]);
    }
    while (highest_ >= 0) {
      while (highest_ >= 0 && buckets_[highest_].empty()) --highest_;
      if (highest_ < 0) break;
      uint32_t u = buckets_[highest_].back();
      buckets_[highest_].pop_back();
      if (excess_[u] <= 0 || height_[u] != highest_ || u == source_ || u == sink_)
        continue;  // stale entry
      discharge(u);
      if (relabel_credit_ <= 0) {
        global_relabel();
        relabel_credit_ = n;
      }
    }
  }

  void solve_bfs_augmenting() {
    // Edmonds-Karp: shortest augmenting paths in the residual network.
    std::vector<std::size_t> pred_arc(nv_);
    std::vector<char> seen(nv_);
    while (true) {
      std::fill(seen.begin(), seen.end(), 0);
      std::queue<uint32_t> q;
      q.push(source_);
      seen[source_] = 1;
      bool found = false;
      while (!q.empty() && !found) {
        uint32_t u = q.front();
        q.pop();
        for (uint32_t a = off_[u]; a < off_[u + 1]; ++a) {
          std::size_t arc = adj_[a];
          uint32_t w = to_[arc];
          if (seen[w] || res_[arc] <= 0) continue;
          seen[w] = 1;
          pred_arc[w] = arc;
          if (w == sink_) {
            found = true;
            break;
          }
          q.push(w);
        }
      }
      if (!found) return;
      Cap delta = inf_;
      for (uint32_t v = sink_; v != source_;) {
        std::size_t arc = pred_arc[v];
        delta = std::min(delta, res_[arc]);
        v = to_[arc ^ 1];
      }
      for (uint32_t v = sink_; v != source_;) {
        std::size_t arc = pred_arc[v];
        res_[arc] -= delta;
        res_[arc ^ 1] += delta;
        v = to_[arc ^ 1];
      }
    }
  }

  // Vertices reachable from the source in the residual network.
  std::vector<char> source_reachable() const {
    std::vector<char> seen(nv_, 0);
    std::queue<uint32_t> q;
    q.push(source_);
    seen[source_] = 1;
    while (!q.empty()) {
      uint32_t u = q.front();
      q.pop();
      for (uint32_t a = off_[u]; a < off_[u + 1]; ++a) {
        std::size_t arc = adj_[a];
        if (res_[arc] > 0 && !seen[to_[arc]]) {
          seen[to_[arc]] = 1;
          q.push(to_[arc]);
        }
      }
    }
    return seen;
  }

  Cap sink_inflow() const {
    Cap s = 0;
    for (uint32_t a = off_[sink_]; a < off_[sink_ + 1]; ++a) {
      std::size_t arc = adj_[a];
      // residual of the reverse pair counts the flow pushed into the sink
      if ((arc & 1) != 0 && to_[arc] != sink_) s += res_[arc];
    }
    return s;
  }

 private:
  void build_adjacency(const Lattice& lat, std::span<const uint32_t> f1,
                       std::span<const uint32_t> f2) {
    std::vector<uint32_t> deg(nv_ + 1, 0);
    for (std::size_t a = 0; a < to_.size(); ++a) ++deg[arc_tail(a, lat, f1, f2) + 1];
    for (std::size_t i = 1; i < deg.size(); ++i) deg[i] += deg[i - 1];
    off_ = deg;
    adj_.resize(to_.size());
    std::vector<uint32_t> fill(off_.begin(), off_.end() - 1);
    for (std::size_t a = 0; a < to_.size(); ++a)
      adj_[fill[arc_tail(a, lat, f1, f2)]++] = a;
  }

  uint32_t arc_tail(std::size_t arc, const Lattice& lat, std::span<const uint32_t> f1,
                    std::span<const uint32_t> f2) const {
    if (arc < 2 * n_real_) {
      const auto& e = lat.edges()[arc / 2];
      return (arc & 1) ? e.v : e.u;
    }
    std::size_t k = arc - 2 * n_real_;
    if (k < 2 * f1.size())
      return (k & 1) ? f1[k / 2] : source_;
    k -= 2 * f1.size();
    return (k & 1) ? sink_ : f2[k / 2];
  }

  void activate(uint32_t u) {
    if (u == source_ || u == sink_ || excess_[u] <= 0) return;
    buckets_[height_[u]].push_back(u);
    if (height_[u] > highest_) highest_ = height_[u];
  }

  void discharge(uint32_t u) {
    while (excess_[u] > 0) {
      if (cur_[u] >= off_[u + 1] - off_[u]) {
        relabel(u);
        if (height_[u] >= static_cast<int>(2 * nv_)) return;
        continue;
      }
      std::size_t arc = adj_[off_[u] + cur_[u]];
      uint32_t w = to_[arc];
      if (res_[arc] > 0 && height_[u] == height_[w] + 1) {
        Cap d = std::min(excess_[u], res_[arc]);
        res_[arc] -= d;
        res_[arc ^ 1] += d;
        excess_[u] -= d;
        excess_[w] += d;
        activate(w);
      } else {
        ++cur_[u];
      }
    }
    if (excess_[u] > 0) activate(u);
  }

  void relabel(uint32_t u) {
    --relabel_credit_;
    int old = height_[u];
    int h = 2 * static_cast<int>(nv_);
    for (uint32_t a = off_[u]; a < off_[u + 1]; ++a) {
      std::size_t arc = adj_[a];
      if (res_[arc] > 0) h = std::min(h, height_[to_[arc]] + 1);
    }
    --count_[old];
    height_[u] = h;
    ++count_[h];
    cur_[u] = 0;
    // gap heuristic: an emptied level below n strands everything above it
    if (count_[old] == 0 && old < static_cast<int>(nv_)) {
      for (uint32_t v = 0; v < nv_; ++v) {
        if (v == source_) continue;
        if (height_[v] > old && height_[v] < static_cast<int>(nv_)) {
          --count_[height_[v]];
          height_[v] = static_cast<int>(nv_) + 1;
          ++count_[height_[v]];
        }
      }
    }
    if (excess_[u] > 0 && height_[u] < static_cast<int>(2 * nv_)) activate(u);
  }

  // Exact distance labels: dist to sink below n, n + dist to source above.
  void global_relabel() {
    const int n = static_cast<int>(nv_);
    std::fill(count_.begin(), count_.end(), 0);
    for (auto& b : buckets_) b.clear();
    highest_ = -1;
    std::vector<int> label(nv_, 2 * n + 1);
    auto bfs = [&](uint32_t root, int base) {
      std::queue<uint32_t> q;
      q.push(root);
      label[root] = base;
      while (!q.empty()) {
        uint32_t w = q.front();
        q.pop();
        for (uint32_t a = off_[w]; a < off_[w + 1]; ++a) {
          std::size_t arc = adj_[a];
          uint32_t v = to_[arc];
          // v can reach w through the pair arc when it has residual capacity
          if (label[v] <= 2 * n && v != root) continue;
          if (res_[arc ^ 1] > 0 && label[v] > label[w] + 1) {
            label[v] = label[w] + 1;
            q.push(v);
          }
        }
      }
    };
    bfs(sink_, 0);
    label[source_] = n;
    bfs(source_, n);
    // heights may only grow: lowering a vertex that already returned flow
    // to the source would invalidate the labeling at the source arcs
    for (uint32_t v = 0; v < nv_; ++v) {
      height_[v] = std::max(height_[v], label[v] <= 2 * n ? label[v] : height_[v]);
      ++count_[height_[v]];
      cur_[v] = 0;
      if (v != source_ && v != sink_ && excess_[v] > 0 && height_[v] < 2 * n)
        activate(v);
    }
  }

  uint32_t nv_;
  uint32_t source_, sink_;
  std::size_t n_real_;
  Cap inf_ = 0;
  std::vector<uint32_t> to_;
  std::vector<Cap> res_;
  std::vector<uint32_t> off_, adj_;
  std::vector<int> height_;
  std::vector<Cap> excess_;
  std::vector<uint32_t> cur_;
  std::vector<int> count_;
  std::vector<std::vector<uint32_t>> buckets_;
  int highest_ = -1;
  int relabel_credit_ = 0;
};

}  // namespace detail

// Exact maximal flow from F1 to F2 in the capacitated lattice, certified by
// a feasible stream and the matching minimal cut. The cut is the canonical
// one closest to F1 (source-reachable set of the final residual network).
inline FlowResult max_flow(const Lattice& lat, const CapacityAssignment& caps,
                           std::span<const uint32_t> f1, std::span<const uint32_t> f2,
                           FlowAlgorithm algo = FlowAlgorithm::PushRelabel) {
  if (caps.size() != lat.edge_count())
    throw ConfigError("capacity assignment does not match the lattice");
  detail::FlowNetwork net(lat, caps, f1, f2);
  if (algo == FlowAlgorithm::PushRelabel)
    net.solve_push_relabel();
  else
    net.solve_bfs_augmenting();

  FlowResult out;
  out.value = net.sink_inflow();

  out.stream.g.resize(lat.edge_count());
  out.stream.toward_v.resize(lat.edge_count());
  for (std::size_t e = 0; e < lat.edge_count(); ++e) {
    Cap f = net.net_flow(e);
    out.stream.g[e] = f >= 0 ? f : -f;
    out.stream.toward_v[e] = f >= 0 ? 1 : 0;
  }

  auto reach = net.source_reachable();
  if (reach[net.sink()])
    throw std::logic_error("augmenting path left after max flow");
  for (uint32_t u = 0; u < lat.vertex_count(); ++u)
    if (reach[u]) out.cut.source_side.push_back(u);
  Cap cut_cap = 0;
  for (std::size_t e = 0; e < lat.edge_count(); ++e) {
    const auto& le = lat.edges()[e];
    if (reach[le.u] != reach[le.v]) {
      out.cut.edges.push_back(static_cast<uint32_t>(e));
      cut_cap += caps.value(e);
    }
  }
  out.cut_capacity = cut_cap;
  if (out.cut_capacity != out.value)
    throw std::logic_error("max-flow / min-cut mismatch: solver bug");
  return out;
}

// V(E): exact capacity of an edge set.
inline Cap cut_capacity(std::span<const uint32_t> edges,
                        const CapacityAssignment& caps) {
  Cap s = 0;
  for (uint32_t e : edges) {
    if (e >= caps.size()) throw ConfigError("unknown edge in cut");
    s += caps.value(e);
  }
  return s;
}

struct StreamCheck {
  bool valid = true;
  Cap flow = 0;
  std::vector<std::string> violations;
};

// Verifies the stream axioms (0 <= g <= t, conservation off the terminals)
// and reports the net throughput into F2 over real edges; by conservation
// this equals the net throughput out of F1, which is also checked.
inline StreamCheck check_stream(const Lattice& lat, const CapacityAssignment& caps,
                                std::span<const uint32_t> f1,
                                std::span<const uint32_t> f2, const Stream& s) {
  StreamCheck out;
  if (s.g.size() != lat.edge_count() || s.toward_v.size() != lat.edge_count()) {
    out.valid = false;
    out.violations.push_back("stream not defined on the lattice edge set");
    return out;
  }
  std::vector<int8_t> role(lat.vertex_count(), 0);
  for (uint32_t u : f1) {
    if (u >= lat.vertex_count()) throw ConfigError("terminal vertex out of range");
    role[u] = 1;
  }
  for (uint32_t u : f2) {
    if (u >= lat.vertex_count()) throw ConfigError("terminal vertex out of range");
    role[u] = 2;
  }

  std::vector<Cap> net(lat.vertex_count(), 0);  // inflow - outflow per vertex
  Cap into_f2 = 0, out_of_f1 = 0;
  for (std::size_t e = 0; e < lat.edge_count(); ++e) {
    Cap g = s.g[e];
    if (g < 0) {
      out.valid = false;
      out.violations.push_back("negative throughput on edge " + std::to_string(e));
      continue;
    }
    if (g > caps.value(e)) {
      out.valid = false;
      out.violations.push_back("capacity exceeded on edge " + std::to_string(e));
    }
    const auto& le = lat.edges()[e];
    uint32_t from = s.toward_v[e] ? le.u : le.v;
    uint32_t to = s.toward_v[e] ? le.v : le.u;
    net[from] -= g;
    net[to] += g;
    if (role[to] == 2 && role[from] != 2) into_f2 += g;
    if (role[from] == 2 && role[to] != 2) into_f2 -= g;
    if (role[from] == 1 && role[to] != 1) out_of_f1 += g;
    if (role[to] == 1 && role[from] != 1) out_of_f1 -= g;
  }
  for (uint32_t v = 0; v < lat.vertex_count(); ++v) {
    if (role[v] == 0 && net[v] != 0) {
      out.valid = false;
      out.violations.push_back("conservation violated at vertex " + std::to_string(v));
    }
  }
  if (out.valid && into_f2 != out_of_f1) {
    out.valid = false;
    out.violations.push_back("net export out of F1 and into F2 disagree");
  }
  out.flow = into_f2;
  return out;
}

// True when removing the cut edges disconnects F1 from F2.
inline bool min_cut_is_cutset(const Lattice& lat, const Cut& cut,
                              std::span<const uint32_t> f1,
                              std::span<const uint32_t> f2) {
  std::vector<char> removed(lat.edge_count(), 0);
  for (uint32_t e : cut.edges) {
    if (e >= lat.edge_count()) throw ConfigError("unknown edge in cut");
    removed[e] = 1;
  }
  auto [off, inc] = lat.adjacency();
  std::vector<char> seen(lat.vertex_count(), 0);
  std::queue<uint32_t> q;
  for (uint32_t u : f1) {
    if (!seen[u]) {
      seen[u] = 1;
      q.push(u);
    }
  }
  while (!q.empty()) {
    uint32_t u = q.front();
    q.pop();
    for (uint32_t i = off[u]; i < off[u + 1]; ++i) {
      uint32_t ei = inc[i];
      if (removed[ei]) continue;
      const auto& e = lat.edges()[ei];
      uint32_t w = (e.u == u) ? e.v : e.u;
      if (!seen[w]) {
        seen[w] = 1;
        q.push(w);
      }
    }
  }
  for (uint32_t u : f2)
    if (seen[u]) return false;
  return true;
}

}  // namespace percoflow
