#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "percoflow/capacity.hpp"
#include "percoflow/continuum.hpp"
#include "percoflow/cylinder.hpp"
#include "percoflow/errors.hpp"
#include "percoflow/flow_solver.hpp"
#include "percoflow/lattice.hpp"
#include "percoflow/parallel.hpp"
#include "percoflow/stats.hpp"

namespace percoflow {

struct TrialRecord {
  int n = 0;
  int trial = 0;
  uint64_t seed = 0;
  Cap phi = 0;         // fixed-point flow value
  double phi_norm = 0; // phi / n^{d-1}
  std::size_t cut_size = 0;
  double seconds = 0.0;
};

struct SummaryRow {
  int n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double ci95 = 0.0;
  int trials = 0;
  double seconds = 0.0;
};

struct ConvergeResult {
  std::vector<SummaryRow> rows;
  std::vector<TrialRecord> records;
  std::optional<FlatCutResult> flat_cut;
};

namespace detail {

inline void check_ladder(const std::vector<int>& n_list, int trials) {
  if (n_list.empty()) throw ConfigError("need at least one mesh size");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw ConfigError("mesh list must be strictly increasing");
  if (trials < 1) throw ConfigError("need trials >= 1");
}

inline Lattice discretize_reporting(const Domain& dom, int n) {
  try {
    return discretize(dom, n);
  } catch (const GeometryError& e) {
    throw GeometryError(std::string(e.what()) + " (at n = " + std::to_string(n) + ")");
  }
}

}  // namespace detail

// Runs the flow experiment over a mesh ladder: one discretization per n,
// independent capacity samples per trial, exact solves, and per-n summaries
// of phi_n / n^{d-1}. Trials are keyed by derive_seed(master, n, trial), so
// the output is independent of the thread count.
inline ConvergeResult run_converge(const Domain& dom, const CapacityLaw& law,
                                   const std::vector<int>& n_list, int trials,
                                   uint64_t master_seed, int threads = 0,
                                   const NuModel* nu = nullptr,
                                   const Vec* flat_axis = nullptr,
                                   int offset_grid = 64) {
  detail::check_ladder(n_list, trials);
  {
    // connectivity is a domain invariant; check it on the finest mesh
    auto finest = detail::discretize_reporting(dom, n_list.back());
    if (!finest.is_connected())
      throw GeometryError("discretized domain is disconnected at n = " +
                          std::to_string(n_list.back()));
  }
  ConvergeResult out;
  out.records.resize(n_list.size() * static_cast<std::size_t>(trials));
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    auto t0 = std::chrono::steady_clock::now();
    Lattice lat = detail::discretize_reporting(dom, n);
    const double scale = std::pow(static_cast<double>(n), dom.dim() - 1);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
      auto tt0 = std::chrono::steady_clock::now();
      uint64_t seed = derive_seed(master_seed, static_cast<uint64_t>(n), t);
      auto caps = sample(law, lat, seed);
      auto fr = max_flow(lat, caps, lat.gamma1_n(), lat.gamma2_n());
      TrialRecord rec;
      rec.n = n;
      rec.trial = static_cast<int>(t);
      rec.seed = seed;
      rec.phi = fr.value;
      rec.phi_norm = cap_to_double(fr.value) / scale;
      rec.cut_size = fr.cut.edges.size();
      rec.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - tt0).count();
      out.records[ni * trials + t] = rec;
    });
    std::vector<double> xs(trials);
    for (int t = 0; t < trials; ++t) xs[t] = out.records[ni * trials + t].phi_norm;
    auto ms = mean_std(xs);
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.rows.push_back({n, ms.mean, ms.stddev, ms.ci95, trials, seconds});
  }
  if (nu != nullptr) {
    Vec axis = flat_axis ? *flat_axis : unit_axis(dom.dim(), 0);
    const auto& [lo, hi] = dom.bounding_box();
    double a = dot(axis, lo), b = dot(axis, hi);
    std::vector<double> offsets;
    for (int i = 0; i < offset_grid; ++i)
      offsets.push_back(a + (b - a) * (i + 0.5) / offset_grid);
    out.flat_cut = flat_cut_bound(dom, *nu, axis, offsets);
  }
  return out;
}

struct PhaseCell {
  double p = 0.0;
  int n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double ci95 = 0.0;
  int trials = 0;
  double seconds = 0.0;
};

struct PhaseResult {
  std::vector<PhaseCell> cells;
  std::optional<double> transition_p;
  double threshold = 0.0;
};

// Sweeps Bernoulli(p, hi) over a p-grid and flags the empirical transition:
// the largest p whose largest-n mean stays below threshold_frac * hi.
inline PhaseResult run_phase(const Domain& dom, const std::vector<double>& p_list,
                             double hi, const std::vector<int>& n_list, int trials,
                             uint64_t master_seed, int threads = 0,
                             double threshold_frac = 0.02) {
  detail::check_ladder(n_list, trials);
  if (p_list.empty()) throw ConfigError("need at least one p value");
  PhaseResult out;
  out.threshold = threshold_frac * hi;
  for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
    uint64_t master_p =
        rng::avalanche(master_seed ^ (rng::kGolden * (static_cast<uint64_t>(pi) + 1)));
    auto law = CapacityLaw::bernoulli(p_list[pi], hi);
    auto res = run_converge(dom, law, n_list, trials, master_p, threads);
    for (const auto& row : res.rows)
      out.cells.push_back({p_list[pi], row.n, row.mean, row.stddev, row.ci95,
                           row.trials, row.seconds});
  }
  const int n_max = n_list.back();
  std::vector<std::pair<double, double>> last;  // (p, mean at n_max)
  for (const auto& c : out.cells)
    if (c.n == n_max) last.push_back({c.p, c.mean});
  std::sort(last.begin(), last.end());
  for (const auto& [p, mean] : last)
    if (mean < out.threshold) out.transition_p = p;
  return out;
}

// Frozen CSV schema: n,mean,std,ci95,trials,seconds
inline void write_converge_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "n,mean,std,ci95,trials,seconds\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%d,%.3f\n", r.n, r.mean,
                  r.stddev, r.ci95, r.trials, r.seconds);
    os << buf;
  }
}

inline void write_phase_csv(std::ostream& os, const std::vector<PhaseCell>& cells) {
  os << "p,n,mean,std,ci95,trials,seconds\n";
  char buf[256];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof(buf), "%.12g,%d,%.12g,%.12g,%.12g,%d,%.3f\n", c.p, c.n,
                  c.mean, c.stddev, c.ci95, c.trials, c.seconds);
    os << buf;
  }
}

inline void write_nu_csv(std::ostream& os, const std::vector<NuEstimateRow>& rows) {
  os << "n,mean,ci95,trials,seconds\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%d,%.3f\n", r.n, r.mean, r.ci95,
                  r.trials, r.seconds);
    os << buf;
  }
}

}  // namespace percoflow
