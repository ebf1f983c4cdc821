// percoflow: simulation laboratory for maximal flows in first-passage
// percolation on a rescaled lattice inside a bounded domain.
//
// Subcommands: discretize, flow, nu, converge, phase, cutval, flatcut.
// Exit codes: 0 success, 2 configuration error, 3 geometry/mesh error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "percoflow/harness.hpp"
#include "percoflow/json_io.hpp"

namespace pf = percoflow;

namespace {

pf::Vec parse_axis(const std::string& s) {
  pf::Vec v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (v.size() < 2) throw pf::ConfigError("axis needs at least two components");
  return v;
}

void emit(const pf::json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw pf::ConfigError("cannot write " + out_path);
  out << j.dump(2) << "\n";
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw pf::ConfigError("cannot write " + out_path);
  out << text;
}

struct CommonArgs {
  std::string domain_path, law_path, out_path;
  std::vector<int> n_list;
  int trials = 100;
  uint64_t seed = 0;
  int threads = 0;
};

int run(int argc, char** argv) {
  CLI::App app{"maximal flows and minimal cuts in first-passage percolation"};
  app.require_subcommand(1);

  // discretize
  auto* cmd_disc = app.add_subcommand("discretize", "build the lattice at mesh 1/n");
  std::string d_domain, d_out;
  int d_n = 8;
  bool d_full = false;
  cmd_disc->add_option("--domain", d_domain, "domain JSON file")->required();
  cmd_disc->add_option("--n", d_n, "mesh parameter")->required();
  cmd_disc->add_option("--out", d_out, "output JSON path (default stdout)");
  cmd_disc->add_flag("--full", d_full, "include the full vertex/edge lists");

  // flow
  auto* cmd_flow = app.add_subcommand("flow", "solve one max-flow instance");
  CommonArgs f;
  int f_n = 16;
  std::string f_algo = "push-relabel";
  cmd_flow->add_option("--domain", f.domain_path)->required();
  cmd_flow->add_option("--n", f_n)->required();
  cmd_flow->add_option("--law", f.law_path, "capacity law JSON file")->required();
  cmd_flow->add_option("--seed", f.seed);
  cmd_flow->add_option("--algo", f_algo, "push-relabel or bfs");
  cmd_flow->add_option("--out", f.out_path);

  // nu
  auto* cmd_nu = app.add_subcommand("nu", "Monte-Carlo estimate of nu(v)");
  CommonArgs nu;
  std::string nu_dir = "0,1";
  double nu_base = 4.0, nu_h = -1.0;
  cmd_nu->add_option("--v", nu_dir, "direction, comma separated");
  cmd_nu->add_option("--law", nu.law_path)->required();
  cmd_nu->add_option("--base", nu_base, "side of the square base");
  cmd_nu->add_option("--height", nu_h, "cylinder half-height (default base/4)");
  cmd_nu->add_option("--n", nu.n_list, "mesh ladder")->required()->delimiter(',');
  cmd_nu->add_option("--trials", nu.trials);
  cmd_nu->add_option("--seed", nu.seed);
  cmd_nu->add_option("--threads", nu.threads);
  cmd_nu->add_option("--out", nu.out_path, "CSV output path");

  // converge
  auto* cmd_conv = app.add_subcommand("converge", "phi_n / n^{d-1} over a mesh ladder");
  CommonArgs cv;
  std::string cv_nu_path, cv_axis = "1,0";
  int cv_grid = 64;
  cmd_conv->add_option("--domain", cv.domain_path)->required();
  cmd_conv->add_option("--law", cv.law_path)->required();
  cmd_conv->add_option("--n", cv.n_list)->required()->delimiter(',');
  cmd_conv->add_option("--trials", cv.trials);
  cmd_conv->add_option("--seed", cv.seed);
  cmd_conv->add_option("--threads", cv.threads);
  cmd_conv->add_option("--out", cv.out_path, "CSV output path");
  cmd_conv->add_option("--nu", cv_nu_path, "nu model JSON: also print a flat-cut bound");
  cmd_conv->add_option("--axis", cv_axis, "flat-cut axis");
  cmd_conv->add_option("--grid", cv_grid, "flat-cut offset grid size");

  // phase
  auto* cmd_phase = app.add_subcommand("phase", "Bernoulli(p, hi) transition sweep");
  CommonArgs ph;
  std::vector<double> ph_p;
  double ph_hi = 1.0, ph_threshold = 0.02;
  cmd_phase->add_option("--domain", ph.domain_path)->required();
  cmd_phase->add_option("--p", ph_p, "p grid")->required()->delimiter(',');
  cmd_phase->add_option("--hi", ph_hi, "capacity of an open edge");
  cmd_phase->add_option("--n", ph.n_list)->required()->delimiter(',');
  cmd_phase->add_option("--trials", ph.trials);
  cmd_phase->add_option("--seed", ph.seed);
  cmd_phase->add_option("--threads", ph.threads);
  cmd_phase->add_option("--threshold", ph_threshold, "transition threshold as a fraction of hi");
  cmd_phase->add_option("--out", ph.out_path, "CSV output path");

  // cutval
  auto* cmd_cut = app.add_subcommand("cutval", "capacity functional of a polyhedral cut");
  std::string cu_domain, cu_cut, cu_nu, cu_out;
  cmd_cut->add_option("--domain", cu_domain)->required();
  cmd_cut->add_option("--cut", cu_cut, "cut JSON file")->required();
  cmd_cut->add_option("--nu", cu_nu, "nu model JSON file")->required();
  cmd_cut->add_option("--out", cu_out);

  // flatcut
  auto* cmd_flat = app.add_subcommand("flatcut", "best flat cut over an offset grid");
  std::string fl_domain, fl_nu, fl_axis = "1,0", fl_out;
  int fl_grid = 64;
  cmd_flat->add_option("--domain", fl_domain)->required();
  cmd_flat->add_option("--nu", fl_nu)->required();
  cmd_flat->add_option("--axis", fl_axis);
  cmd_flat->add_option("--grid", fl_grid);
  cmd_flat->add_option("--out", fl_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad arguments are configuration errors
  }

  if (cmd_disc->parsed()) {
    auto dom = pf::parse_domain(pf::load_json_file(d_domain));
    auto lat = pf::discretize(dom, d_n);
    emit(pf::lattice_to_json(lat, d_full), d_out);
  } else if (cmd_flow->parsed()) {
    auto dom = pf::parse_domain(pf::load_json_file(f.domain_path));
    auto law = pf::parse_law(pf::load_json_file(f.law_path));
    auto algo = pf::FlowAlgorithm::PushRelabel;
    if (f_algo == "bfs")
      algo = pf::FlowAlgorithm::BfsAugmenting;
    else if (f_algo != "push-relabel")
      throw pf::ConfigError("unknown algorithm: " + f_algo);
    auto lat = pf::discretize(dom, f_n);
    auto caps = pf::sample(law, lat, f.seed);
    auto t0 = std::chrono::steady_clock::now();
    auto fr = pf::max_flow(lat, caps, lat.gamma1_n(), lat.gamma2_n(), algo);
    double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    pf::json j;
    j["value"] = pf::cap_to_double(fr.value);
    j["value_per_nd1"] =
        pf::cap_to_double(fr.value) / std::pow(static_cast<double>(f_n), dom.dim() - 1);
    j["cut_size"] = fr.cut.edges.size();
    j["runtime_ms"] = ms;
    emit(j, f.out_path);
  } else if (cmd_nu->parsed()) {
    auto law = pf::parse_law(pf::load_json_file(nu.law_path));
    auto v = parse_axis(nu_dir);
    double h = nu_h > 0 ? nu_h : nu_base / 4.0;
    auto est = pf::estimate_nu(v, law, nu_base, h, nu.n_list, nu.trials, nu.seed,
                               nu.threads);
    std::ostringstream csv;
    pf::write_nu_csv(csv, est.rows);
    emit_text(csv.str(), nu.out_path);
    std::cerr << "nu(" << nu_dir << ") ~= " << est.point_estimate() << " +- "
              << est.point_ci() << " at n = " << est.rows.back().n << "\n";
  } else if (cmd_conv->parsed()) {
    auto dom = pf::parse_domain(pf::load_json_file(cv.domain_path));
    auto law = pf::parse_law(pf::load_json_file(cv.law_path));
    std::optional<pf::NuModel> numod;
    if (!cv_nu_path.empty()) numod = pf::parse_nu_model(pf::load_json_file(cv_nu_path));
    pf::Vec axis = parse_axis(cv_axis);
    auto res = pf::run_converge(dom, law, cv.n_list, cv.trials, cv.seed, cv.threads,
                                numod ? &*numod : nullptr, &axis, cv_grid);
    std::ostringstream csv;
    pf::write_converge_csv(csv, res.rows);
    emit_text(csv.str(), cv.out_path);
    if (res.flat_cut)
      std::cerr << "flat-cut bound " << res.flat_cut->value << " at offset "
                << res.flat_cut->best_offset << "\n";
  } else if (cmd_phase->parsed()) {
    auto dom = pf::parse_domain(pf::load_json_file(ph.domain_path));
    auto res = pf::run_phase(dom, ph_p, ph_hi, ph.n_list, ph.trials, ph.seed,
                             ph.threads, ph_threshold);
    std::ostringstream csv;
    pf::write_phase_csv(csv, res.cells);
    emit_text(csv.str(), ph.out_path);
    if (res.transition_p)
      std::cerr << "empirical transition at p = " << *res.transition_p << "\n";
    else
      std::cerr << "no transition flagged on this grid\n";
  } else if (cmd_cut->parsed()) {
    auto dom = pf::parse_domain(pf::load_json_file(cu_domain));
    auto cut = pf::parse_cut(pf::load_json_file(cu_cut), dom.dim());
    auto numod = pf::parse_nu_model(pf::load_json_file(cu_nu));
    auto val = pf::i_omega(cut, dom, numod);
    pf::json j;
    j["value"] = val.value;
    j["pieces"] = pf::json::array();
    for (const auto& p : val.pieces)
      j["pieces"].push_back({{"facet", p.facet},
                             {"area", p.area},
                             {"normal", p.normal},
                             {"nu", p.nu_value}});
    emit(j, cu_out);
  } else if (cmd_flat->parsed()) {
    auto dom = pf::parse_domain(pf::load_json_file(fl_domain));
    auto numod = pf::parse_nu_model(pf::load_json_file(fl_nu));
    pf::Vec axis = parse_axis(fl_axis);
    const auto& [lo, hi] = dom.bounding_box();
    double a = pf::dot(axis, lo) / pf::norm2(axis), b = pf::dot(axis, hi) / pf::norm2(axis);
    std::vector<double> offsets;
    for (int i = 0; i < fl_grid; ++i)
      offsets.push_back(a + (b - a) * (i + 0.5) / fl_grid);
    auto best = pf::flat_cut_bound(dom, numod, axis, offsets);
    pf::json j;
    j["best_offset"] = best.best_offset;
    j["value"] = best.value;
    emit(j, fl_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pf::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
