// Command-line front end: simulate / geodesic / beam / transform / sweep /
// check.  All numeric output goes to CSV (%.17g), JSON summaries, or binary
// field containers; wall-clock timing is stderr-only so files are
// reproducible byte for byte.  Exit codes: 0 ok, 2 config error,
// 3 numerical breakdown, 4 resolution guard, 1 failed check suite.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wv/beam.hpp"
#include "wv/config.hpp"
#include "wv/errors.hpp"
#include "wv/fields.hpp"
#include "wv/fit.hpp"
#include "wv/geodesic.hpp"
#include "wv/io.hpp"
#include "wv/jacobi.hpp"
#include "wv/media.hpp"
#include "wv/solver.hpp"
#include "wv/sweep.hpp"
#include "wv/transform.hpp"
#include "wv/tube.hpp"

using json = nlohmann::json;

namespace {

wv::Vec3 parse_vec3(const std::string& s, const char* what) {
  std::vector<double> v;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw wv::ConfigError(std::string(what) + ": expected three comma-separated numbers");
    }
  }
  if (v.size() != 3)
    throw wv::ConfigError(std::string(what) + ": expected three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

// medium flags shared by the geometry subcommands
struct MediumFlags {
  std::string kind = "constant";
  double c0 = 1.0;
  double alpha = 1.5;

  void attach(CLI::App* app) {
    app->add_option("--medium", kind, "sound speed family: constant or herglotz")
        ->check(CLI::IsMember({"constant", "herglotz"}));
    app->add_option("--c0", c0, "constant sound speed value");
    app->add_option("--alpha", alpha, "herglotz profile center speed (>= 1)");
  }

  wv::SoundSpeed make() const {
    if (kind == "herglotz") return wv::SoundSpeed::herglotz(alpha);
    return wv::SoundSpeed::constant(c0);
  }
};

wv::SoundSpeed medium_from_config(const wv::Config& cfg) {
  std::string kind = cfg.get_string("medium", "constant");
  if (kind == "constant") return wv::SoundSpeed::constant(cfg.get_double("c0", 1.0));
  if (kind == "herglotz") return wv::SoundSpeed::herglotz(cfg.get_double("alpha", 1.5));
  throw wv::ConfigError("unknown medium '" + kind + "' (constant or herglotz)");
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw wv::ConfigError("cannot open output file: " + path);
  out << j.dump(2) << '\n';
}

json fit_json(const wv::SlopeFit& f) {
  return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

std::vector<double> parse_sweep_range(const std::string& s) {
  // lo:hi:factor, multiplicative ladder
  double lo, hi, fac;
  char c1, c2;
  std::istringstream ss(s);
  if (!(ss >> lo >> c1 >> hi >> c2 >> fac) || c1 != ':' || c2 != ':' || !(ss >> std::ws).eof())
    throw wv::ConfigError("--tau-sweep: expected lo:hi:factor");
  if (lo <= 0 || hi < lo || fac <= 1.0)
    throw wv::ConfigError("--tau-sweep: need 0 < lo <= hi and factor > 1");
  std::vector<double> out;
  for (double t = lo; t <= hi * (1.0 + 1e-12); t *= fac) out.push_back(t);
  return out;
}

// ------------------------------------------------------------------ simulate

int cmd_simulate(const std::string& cfg_path) {
  wv::Config cfg = wv::Config::parse_file(cfg_path);
  wv::SoundSpeed c = medium_from_config(cfg);
  double beta = cfg.get_double("beta", 0.0);
  wv::Grid3D g(cfg.get_int("n", 17), cfg.get_double("dt", 0.03), cfg.get_double("T", 3.0));
  std::string profile = cfg.get_string("profile", "onset");
  double amp = cfg.get_double("amplitude", 0.1);
  std::string out_field = cfg.get_string("out_field", "");
  std::string out_dn = cfg.get_string("out_dn", "dn.csv");
  std::string out_summary = cfg.get_string("out_summary", "");
  wv::StepperOptions opt;
  opt.cg_tol = cfg.get_double("cg_tol", opt.cg_tol);
  opt.picard_tol = cfg.get_double("picard_tol", opt.picard_tol);
  opt.degen_thresh = cfg.get_double("degeneracy_threshold", opt.degen_thresh);
  cfg.reject_unknown();

  wv::BoundaryFn bf;
  if (profile == "onset")
    bf = wv::onset_profile(amp);
  else if (profile == "zero")
    bf = wv::zero_profile();
  else
    throw wv::ConfigError("unknown profile '" + profile + "' (onset or zero)");

  wv::SolveReport rep = wv::solve_wave(g, c, wv::Nonlinearity::constant(beta), bf, nullptr,
                                       !out_field.empty(), opt);
  if (!out_field.empty()) wv::write_field(out_field, rep.field);

  wv::CsvWriter csv(out_dn, {"t", "face", "i", "j", "value"});
  for (int k = 0; k < g.nt; ++k)
    for (int face = 0; face < 6; ++face)
      for (int a = 0; a < g.n; ++a)
        for (int b = 0; b < g.n; ++b)
          csv.row({g.t(k), (double)face, (double)a, (double)b, rep.dn.steps[k].at(face, a, b)});

  if (!out_summary.empty()) {
    json j;
    j["grid"] = {{"n", g.n}, {"dx", g.dx}, {"dt", g.dt}, {"nt", g.nt}, {"T", g.T}};
    j["beta"] = beta;
    j["profile"] = profile;
    j["amplitude"] = amp;
    j["min_factor"] = rep.min_factor;
    j["max_picard"] = rep.max_picard;
    j["total_cg"] = rep.total_cg;
    j["dn_l2_sigma"] = wv::l2_sigma(rep.dn);
    write_json(out_summary, j);
  }
  return 0;
}

// ------------------------------------------------------------------ geodesic

int cmd_geodesic(const MediumFlags& med, const std::string& entry_s, const std::string& dir_s,
                 double step, const std::string& out_csv, const std::string& out_json) {
  wv::SoundSpeed c = med.make();
  wv::Vec3 p = parse_vec3(entry_s, "--entry");
  wv::Vec3 dir = parse_vec3(dir_s, "--dir");
  wv::Geodesic geo = wv::shoot_geodesic(c, p, dir, step);

  if (!out_csv.empty()) {
    wv::CsvWriter csv(out_csv, {"t", "x1", "x2", "x3", "v1", "v2", "v3"});
    for (size_t k = 0; k < geo.t.size(); ++k)
      csv.row({geo.t[k], geo.s[k][0], geo.s[k][1], geo.s[k][2], geo.s[k][3], geo.s[k][4],
               geo.s[k][5]});
  }
  if (!out_json.empty()) {
    json j;
    j["entry"] = {p[0], p[1], p[2]};
    j["direction"] = {geo.dir[0], geo.dir[1], geo.dir[2]};
    j["exit_point"] = {geo.x_exit[0], geo.x_exit[1], geo.x_exit[2]};
    wv::Vec3 eta = wv::normalized(geo.v_exit);
    j["exit_direction"] = {eta[0], eta[1], eta[2]};
    j["length"] = geo.t_exit;
    j["unit_speed_error"] = wv::unit_speed_error(c, geo);
    write_json(out_json, j);
  }
  return 0;
}

// ---------------------------------------------------------------------- beam

int cmd_beam(const MediumFlags& med, const std::string& entry_s, const std::string& dir_s,
             double step, double tau, double rho, int n, double dt, double T,
             const std::string& out_field, const std::string& out_csv) {
  wv::SoundSpeed c = med.make();
  wv::Vec3 p = parse_vec3(entry_s, "--entry");
  wv::Vec3 dir = parse_vec3(dir_s, "--dir");
  wv::Geodesic geo = wv::shoot_geodesic(c, p, dir, step);
  wv::GaussianBeam beam(c, geo, tau, rho, step);

  if (!out_field.empty()) {
    wv::Grid3D g(n, dt, T);
    double sigma1 = 1.0 / (2.0 * std::sqrt(tau));
    if (g.dx > sigma1)
      throw wv::ResolutionGuard("beam sampling: dx exceeds the beam width 1/(2 sqrt(tau))");
    wv::CSpaceTimeField f;
    f.grid = g;
    f.frames.assign((size_t)g.nt, wv::CField3(g.n));
    for (int k = 0; k < g.nt; ++k)
      for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
          for (int l = 0; l < g.n; ++l)
            f.frames[k].at(i, j, l) = beam.value(g.t(k), {g.x(i), g.x(j), g.x(l)});
    wv::write_field(out_field, f);
  }

  if (!out_csv.empty()) {
    bool flat = c.is_constant() && std::abs(c.constant_value() - 1.0) < 1e-12 &&
                wv::norm(wv::operator-(p, wv::Vec3{-1, 0, 0})) < 1e-12 &&
                wv::norm(wv::operator-(geo.dir, wv::Vec3{1, 0, 0})) < 1e-12;
    if (flat) {
      wv::TubeNorm nrm = wv::flat_beam_l2(beam);
      wv::TubeNorm res = wv::flat_residual_l2(beam);
      wv::CsvWriter csv(out_csv, {"tau", "rho", "l2", "l2_predicted", "residual_l2",
                                  "residual_predicted"});
      csv.row({tau, rho, nrm.value, nrm.predicted, res.value, res.predicted});
    } else {
      double l2 = wv::tube_l2_generic(beam, T);
      double ric = wv::riccati_residual(beam.flow(), beam.chart());
      wv::CsvWriter csv(out_csv, {"tau", "rho", "l2_tube", "riccati_residual",
                                  "conservation_drift", "min_imh_eig"});
      csv.row({tau, rho, l2, ric, beam.flow().conservation_drift, beam.flow().min_imH_eig});
    }
  }
  return 0;
}

// ----------------------------------------------------------------- transform

int cmd_transform(const MediumFlags& med, const std::string& entry_s, const std::string& dir_s,
                  double step, const std::string& tau_sweep, double rho, double beta,
                  const std::string& out_csv) {
  wv::SoundSpeed c = med.make();
  wv::Vec3 p = parse_vec3(entry_s, "--entry");
  wv::Vec3 dir = parse_vec3(dir_s, "--dir");
  std::vector<double> taus = parse_sweep_range(tau_sweep);
  wv::Nonlinearity bn = wv::Nonlinearity::constant(beta);
  auto bfn = [&](const wv::Vec3& x) { return bn.beta(x); };

  wv::Geodesic geo = wv::shoot_geodesic(c, p, dir, step);
  wv::CsvWriter csv(out_csv,
                    {"tau", "rho", "J_re", "J_im", "pairing_re", "pairing_im", "abs_gap"});
  for (double tau : taus) {
    wv::GaussianBeam beam(c, geo, tau, rho, step);
    // the pairing quadrature is validated on the flat axis chord only;
    // require_canonical_flat rejects anything else with a config error.
    // flat_pairing carries unit weight, so a constant weight scales it.
    wv::cplx pairing = beta * wv::flat_pairing(beam);
    wv::cplx J = wv::jacobi_transform(beam.chart(), beam.flow(), bfn);
    wv::cplx pred = wv::pairing_constant(beam) * J;
    csv.row({tau, rho, J.real(), J.imag(), pairing.real(), pairing.imag(),
             std::abs(pairing - pred)});
    std::cerr << "transform: tau " << tau << " done\n";
  }
  return 0;
}

// --------------------------------------------------------------------- sweep

struct BreakdownLog {
  std::vector<std::pair<double, std::string>> rows;

  void write(const std::string& path, const char* param_name) {
    wv::CsvWriter csv(path, {param_name, "message"});
    for (const auto& [v, msg] : rows) csv.row_mixed({wv::fmt_g17(v), msg});
  }
};

// shared ladder runner: anchor trace once, then one run per delta with
// breakdown capture
wv::LadderResult run_ladder(const wv::Grid3D& g, const wv::SoundSpeed& c_base,
                            const std::function<wv::SoundSpeed(double)>& c_of,
                            double beta_base, const std::function<double(double)>& beta_of,
                            const std::vector<double>& deltas, double amp, BreakdownLog& bk,
                            std::vector<double>& min_factors) {
  wv::RBoundaryTrace base = wv::dn_of_run(g, c_base, beta_base, amp);
  std::vector<wv::LadderPoint> pts;
  for (double d : deltas) {
    try {
      double mf = 0;
      wv::RBoundaryTrace tr = wv::dn_of_run(g, c_of(d), beta_of(d), amp, &mf);
      pts.push_back({d, wv::trace_difference(base, tr)});
      min_factors.push_back(mf);
      std::cerr << "sweep: delta " << d << " done\n";
    } catch (const wv::NumericalBreakdown& e) {
      bk.rows.emplace_back(d, e.what());
      std::cerr << "sweep: delta " << d << " broke down\n";
    }
  }
  if (pts.size() < 4)
    throw wv::NumericalBreakdown("sweep: fewer than 4 stable points, no fit possible");
  return wv::finish_ladder(std::move(pts));
}

void write_ladder_outputs(const wv::LadderResult& lr, const std::vector<double>& min_factors,
                          BreakdownLog& bk, const std::string& out,
                          const std::string& out_fit, const std::string& out_breakdown,
                          const char* param_name) {
  wv::CsvWriter csv(out, {param_name, "dn_difference", "min_factor"});
  for (size_t i = 0; i < lr.points.size(); ++i)
    csv.row({lr.points[i].delta, lr.points[i].dn_diff, min_factors[i]});
  if (!out_fit.empty()) {
    json j;
    j["fit"] = fit_json(lr.fit);
    j["monotone"] = lr.monotone;
    j["points"] = lr.points.size();
    j["breakdowns"] = bk.rows.size();
    write_json(out_fit, j);
  }
  if (!out_breakdown.empty()) bk.write(out_breakdown, param_name);
}

int cmd_sweep(const std::string& cfg_path) {
  wv::Config cfg = wv::Config::parse_file(cfg_path);
  std::string study = cfg.get_string("study");
  std::string out = cfg.get_string("out");
  std::string out_fit = cfg.get_string("out_fit", "");
  std::string out_breakdown = cfg.get_string("out_breakdown", "");

  if (study == "beta_sweep" || study == "herglotz_sweep" || study == "c_const_sweep") {
    wv::Grid3D g(cfg.get_int("n", 17), cfg.get_double("dt", 0.03), cfg.get_double("T", 3.0));
    double amp = cfg.get_double("amplitude", 0.1);
    std::vector<double> deltas = cfg.get_double_list("deltas");
    BreakdownLog bk;
    std::vector<double> mfs;
    wv::LadderResult lr;
    const char* pname = "delta";
    if (study == "beta_sweep") {
      wv::SoundSpeed c = medium_from_config(cfg);
      double beta1 = cfg.get_double("beta1");
      cfg.reject_unknown();
      lr = run_ladder(
          g, c, [&](double) { return c; }, beta1, [&](double d) { return beta1 + d; }, deltas,
          amp, bk, mfs);
    } else if (study == "c_const_sweep") {
      double c1 = cfg.get_double("c1");
      double beta = cfg.get_double("beta", 0.0);
      cfg.reject_unknown();
      lr = run_ladder(
          g, wv::SoundSpeed::constant(c1),
          [&](double d) { return wv::SoundSpeed::constant(c1 + d); }, beta,
          [&](double) { return beta; }, deltas, amp, bk, mfs);
    } else {
      std::string mode = cfg.get_string("mode");  // beta or alpha
      if (mode == "beta") {
        double alpha = cfg.get_double("alpha", 1.5);
        double beta1 = cfg.get_double("beta1");
        cfg.reject_unknown();
        wv::SoundSpeed c = wv::SoundSpeed::herglotz(alpha);
        lr = run_ladder(
            g, c, [&](double) { return c; }, beta1, [&](double d) { return beta1 + d; },
            deltas, amp, bk, mfs);
      } else if (mode == "alpha") {
        double alpha1 = cfg.get_double("alpha1");
        double beta = cfg.get_double("beta", 0.0);
        cfg.reject_unknown();
        lr = run_ladder(
            g, wv::SoundSpeed::herglotz(alpha1),
            [&](double d) { return wv::SoundSpeed::herglotz(alpha1 + d); }, beta,
            [&](double) { return beta; }, deltas, amp, bk, mfs);
      } else {
        throw wv::ConfigError("herglotz_sweep: mode must be beta or alpha");
      }
    }
    write_ladder_outputs(lr, mfs, bk, out, out_fit, out_breakdown, pname);
    return 0;
  }

  if (study == "residual_scaling") {
    std::vector<double> taus = cfg.get_double_list("taus");
    double rho = cfg.get_double("rho", 4.0);
    cfg.reject_unknown();
    wv::SoundSpeed c = wv::SoundSpeed::constant(1.0);
    wv::Geodesic geo = wv::shoot_geodesic(c, {-1, 0, 0}, {1, 0, 0});
    wv::CsvWriter csv(out, {"tau", "rho", "l2", "l2_predicted", "residual_l2",
                            "residual_predicted"});
    std::vector<double> res_vals;
    for (double tau : taus) {
      wv::GaussianBeam beam(c, geo, tau, rho);
      wv::TubeNorm nrm = wv::flat_beam_l2(beam);
      wv::TubeNorm res = wv::flat_residual_l2(beam);
      csv.row({tau, rho, nrm.value, nrm.predicted, res.value, res.predicted});
      res_vals.push_back(res.value);
      std::cerr << "sweep: tau " << tau << " done\n";
    }
    if (!out_fit.empty()) {
      json j;
      j["residual_fit"] = fit_json(wv::loglog_fit(taus, res_vals));
      write_json(out_fit, j);
    }
    return 0;
  }

  if (study == "linearization_scaling") {
    wv::Grid3D g(cfg.get_int("n", 17), cfg.get_double("dt", 0.03), cfg.get_double("T", 3.0));
    double beta = cfg.get_double("beta", 0.5);
    double amp = cfg.get_double("amplitude", 0.1);
    std::vector<double> eps = cfg.get_double_list("eps");
    cfg.reject_unknown();
    auto rows = wv::expansion_remainders(g, beta, amp, eps);
    wv::CsvWriter csv(out, {"eps", "q_norm", "r_norm", "min_factor"});
    std::vector<double> qs, rs;
    for (const auto& r : rows) {
      csv.row({r.eps, r.q, r.r, r.min_factor});
      qs.push_back(r.q);
      rs.push_back(r.r);
    }
    if (!out_fit.empty()) {
      json j;
      j["q_fit"] = fit_json(wv::loglog_fit(eps, qs));
      j["r_fit"] = fit_json(wv::loglog_fit(eps, rs));
      write_json(out_fit, j);
    }
    return 0;
  }

  throw wv::ConfigError("unknown study '" + study + "'");
}

// --------------------------------------------------------------------- check

int cmd_check() {
  int failures = 0;
  auto report = [&](const char* name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS  " : "FAIL  ") << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << '\n';
    if (!ok) ++failures;
  };

  {  // flat-chord Jacobi flow against the closed form (1+is)^2
    wv::SoundSpeed c = wv::SoundSpeed::constant(1.0);
    wv::Geodesic geo = wv::shoot_geodesic(c, {-1, 0, 0}, {1, 0, 0});
    wv::FermiChart chart(c, geo);
    wv::JacobiFlow fl = wv::integrate_jacobi(chart, 0.0, 0.0, chart.s_max());
    double err = 0.0;
    for (size_t k = 0; k < fl.s_nodes.size(); ++k) {
      wv::cplx ref = std::pow(wv::cplx(1.0, fl.s_nodes[k]), 2);
      err = std::max(err, std::abs(fl.detY[k] - ref));
    }
    report("jacobi.flat_detY", err < 1e-8, "max err " + wv::fmt_g17(err));
    report("jacobi.conservation", fl.conservation_drift < 1e-8,
           "drift " + wv::fmt_g17(fl.conservation_drift));
  }
  {  // slope fitter on exact power laws
    std::vector<double> xs = {1, 2, 3, 4, 5}, y2, y3;
    for (double x : xs) {
      y2.push_back(x * x);
      y3.push_back(3 * x);
    }
    auto f2 = wv::loglog_fit(xs, y2);
    auto f3 = wv::loglog_fit(xs, y3);
    report("fit.quadratic", std::abs(f2.slope - 2) < 1e-12 && std::abs(f2.r2 - 1) < 1e-12);
    report("fit.linear", std::abs(f3.slope - 1) < 1e-12 &&
                             std::abs(f3.intercept - std::log(3.0)) < 1e-12);
  }
  {  // non-trapping family checks
    report("media.herglotz_ok", wv::herglotz_check(wv::SoundSpeed::herglotz(1.5), 9));
    report("media.constant_ok", wv::herglotz_check(wv::SoundSpeed::constant(1.0), 9));
  }
  {  // solver determinism: identical runs, bitwise-identical traces
    wv::Grid3D g(9, 0.06, 1.2);
    wv::SoundSpeed c = wv::SoundSpeed::constant(1.0);
    wv::Nonlinearity b = wv::Nonlinearity::constant(0.3);
    auto r1 = wv::solve_wave(g, c, b, wv::onset_profile(0.1), nullptr, false);
    auto r2 = wv::solve_wave(g, c, b, wv::onset_profile(0.1), nullptr, false);
    bool same = true;
    for (size_t k = 0; k < r1.dn.steps.size() && same; ++k)
      for (int f = 0; f < 6 && same; ++f)
        for (int a = 0; a < g.n && same; ++a)
          for (int bb = 0; bb < g.n && same; ++bb)
            same = r1.dn.steps[k].at(f, a, bb) == r2.dn.steps[k].at(f, a, bb);
    report("solver.deterministic", same);
  }
  {  // dn difference grows with the nonlinearity gap
    wv::Grid3D g(9, 0.06, 1.8);
    wv::SoundSpeed c = wv::SoundSpeed::constant(1.0);
    auto lr = wv::beta_ladder(g, c, 0.1, {0.01, 0.02, 0.04, 0.08}, 0.1);
    report("sweep.monotone_ladder", lr.monotone, "slope " + wv::fmt_g17(lr.fit.slope));
  }
  {  // guard plumbing: unresolvable quadrature must trip, not mis-integrate
    wv::SoundSpeed c = wv::SoundSpeed::constant(1.0);
    wv::Geodesic geo = wv::shoot_geodesic(c, {-1, 0, 0}, {1, 0, 0});
    wv::GaussianBeam beam(c, geo, 25.0, 4.0);
    bool tripped = false;
    try {
      wv::flat_beam_l2(beam, 2.0, 240, 8, 8);
    } catch (const wv::ResolutionGuard&) {
      tripped = true;
    }
    report("tube.resolution_guard", tripped);
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wave workbench: nonlinear forward solver, beams, ray transforms"};
  app.require_subcommand(1);

  std::string cfg_path;
  auto* sim = app.add_subcommand("simulate", "run the forward solver from a config file");
  sim->add_option("--config", cfg_path, "key=value config file")->required();

  MediumFlags gmed;
  std::string entry = "-1,0,0", gdir = "1,0,0";
  double step = 1e-3;
  std::string geo_csv, geo_json;
  auto* geod = app.add_subcommand("geodesic", "trace a unit-speed ray across the cube");
  gmed.attach(geod);
  geod->add_option("--entry", entry, "entry point px,py,pz");
  geod->add_option("--dir", gdir, "entry direction dx,dy,dz");
  geod->add_option("--step", step, "integrator step in g-time");
  geod->add_option("--out-csv", geo_csv, "trajectory CSV path");
  geod->add_option("--out-json", geo_json, "scattering datum JSON path");

  MediumFlags bmed;
  std::string bentry = "-1,0,0", bdir = "1,0,0";
  double bstep = 1e-3, tau = 25.0, rho = 4.0;
  int bn = 25;
  double bdt = 0.05, bT = 2.0;
  std::string beam_field, beam_csv;
  auto* beam = app.add_subcommand("beam", "build a gaussian beam along a ray");
  bmed.attach(beam);
  beam->add_option("--entry", bentry, "entry point px,py,pz");
  beam->add_option("--dir", bdir, "entry direction dx,dy,dz");
  beam->add_option("--step", bstep, "integrator step in g-time");
  beam->add_option("--tau", tau, "beam frequency parameter");
  beam->add_option("--rho", rho, "tube radius");
  beam->add_option("--n", bn, "sampling nodes per axis for the field container");
  beam->add_option("--dt", bdt, "sampling time step");
  beam->add_option("--T", bT, "sampling horizon");
  beam->add_option("--out-field", beam_field, "field container path");
  beam->add_option("--out-csv", beam_csv, "norm/residual CSV path");

  MediumFlags tmed;
  std::string tentry = "-1,0,0", tdir = "1,0,0", tau_sweep = "40:320:2";
  double tstep = 1e-3, trho = 1.2, tbeta = 1.0;
  std::string tr_csv = "transform.csv";
  auto* tr = app.add_subcommand("transform", "weighted ray transform and beam pairing");
  tmed.attach(tr);
  tr->add_option("--entry", tentry, "entry point px,py,pz");
  tr->add_option("--dir", tdir, "entry direction dx,dy,dz");
  tr->add_option("--step", tstep, "integrator step in g-time");
  tr->add_option("--tau-sweep", tau_sweep, "frequency ladder lo:hi:factor");
  tr->add_option("--rho", trho, "tube radius");
  tr->add_option("--beta", tbeta, "constant nonlinearity value");
  tr->add_option("--out", tr_csv, "output CSV path");

  std::string sweep_cfg;
  auto* sw = app.add_subcommand("sweep", "parameter studies from a config file");
  sw->add_option("--config", sweep_cfg, "key=value config file")->required();

  app.add_subcommand("check", "run the fast invariant suites");

  try {
    app.parse(argc, argv);
    auto t0 = std::chrono::steady_clock::now();
    int rc = 0;
    if (sim->parsed())
      rc = cmd_simulate(cfg_path);
    else if (geod->parsed())
      rc = cmd_geodesic(gmed, entry, gdir, step, geo_csv, geo_json);
    else if (beam->parsed())
      rc = cmd_beam(bmed, bentry, bdir, bstep, tau, rho, bn, bdt, bT, beam_field, beam_csv);
    else if (tr->parsed())
      rc = cmd_transform(tmed, tentry, tdir, tstep, tau_sweep, trho, tbeta, tr_csv);
    else if (sw->parsed())
      rc = cmd_sweep(sweep_cfg);
    else
      rc = cmd_check();
    auto dt_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
    std::cerr << "elapsed " << dt_ms << " ms\n";
    return rc;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const wv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return wv::ConfigError::exit_code;
  } catch (const wv::NumericalBreakdown& e) {
    std::cerr << "numerical breakdown: " << e.what() << '\n';
    return wv::NumericalBreakdown::exit_code;
  } catch (const wv::ResolutionGuard& e) {
    std::cerr << "resolution guard: " << e.what() << '\n';
    return wv::ResolutionGuard::exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
