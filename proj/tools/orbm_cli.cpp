// Command-line front end: parameter reports, regime region grids, Skorokhod
// path solving, reflected SDE simulation, coupled-pair demos and the named
// verification suites.  Reports are JSON, time series CSV; every artifact
// embeds the materialized run configuration.  Exit codes: 0 success, 1
// validation error, 2 verification-suite failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "orbm/coupling.hpp"
#include "orbm/io.hpp"
#include "orbm/verify.hpp"

using namespace orbm;

namespace {

std::string out_path(const std::string& name, const std::string& override_path) {
  if (!override_path.empty()) return override_path;
  const char* dir = std::getenv("ORBM_OUT_DIR");
  return (dir && *dir ? std::string(dir) : std::string(".")) + "/" + name;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  write_file(path, text);
  std::cerr << "wrote " << path << "\n";
}

json base_config(const std::string& subcommand) {
  json j;
  j["subcommand"] = subcommand;
  j["version"] = kVersion;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflected Brownian motion in a quadrant: Skorokhod maps, conformal "
               "transports, coupled-gap amplification and closed-form verification"};
  app.require_subcommand(1);

  double theta1 = std::numbers::pi / 3;
  double theta2 = -std::numbers::pi / 6;
  std::uint64_t seed = 1;
  double dt = 1e-4;
  double horizon = 1.0;
  std::string out;

  // --- params ---------------------------------------------------------
  auto* cmd_params = app.add_subcommand("params", "derived constants and regime label");
  cmd_params->add_option("--theta1", theta1, "reflection angle on the lower face (radians)");
  cmd_params->add_option("--theta2", theta2, "reflection angle on the left face (radians)");
  cmd_params->add_option("-o,--out", out, "output path (default stdout)");

  // --- region ---------------------------------------------------------
  auto* cmd_region = app.add_subcommand("region", "regime grid over an angle rectangle");
  int res = 64;
  double t1_min = std::numbers::pi / 4, t1_max = std::numbers::pi / 2;
  double t2_min = -std::numbers::pi / 2, t2_max = 0.0;
  cmd_region->add_option("--res", res, "grid resolution per axis");
  cmd_region->add_option("--theta1-min", t1_min, "");
  cmd_region->add_option("--theta1-max", t1_max, "");
  cmd_region->add_option("--theta2-min", t2_min, "");
  cmd_region->add_option("--theta2-max", t2_max, "");
  cmd_region->add_option("-o,--out", out, "output CSV path");

  // --- reflect --------------------------------------------------------
  auto* cmd_reflect = app.add_subcommand("reflect", "solve the Skorokhod map for a driver");
  std::string driver_path;
  std::string domain = "quadrant";
  double x0 = 0.5, y0 = 0.5;
  double eta = 0.05;
  cmd_reflect->add_option("--driver", driver_path,
                          "driver CSV (t,bx,by); omit to use a seeded Brownian driver");
  cmd_reflect->add_option("--theta1", theta1, "");
  cmd_reflect->add_option("--theta2", theta2, "");
  cmd_reflect->add_option("--domain", domain, "quadrant | strip")
      ->check(CLI::IsMember({"quadrant", "strip"}));
  cmd_reflect->add_option("--x0", x0, "start x");
  cmd_reflect->add_option("--y0", y0, "start y");
  cmd_reflect->add_option("--seed", seed, "Brownian driver seed");
  cmd_reflect->add_option("--T", horizon, "Brownian driver horizon");
  cmd_reflect->add_option("--dt", dt, "grid step");
  cmd_reflect->add_option("-o,--out", out, "output CSV path");

  // --- simulate -------------------------------------------------------
  auto* cmd_sim = app.add_subcommand("simulate", "reflected SDE with optional drift and stops");
  std::string drift_name = "none";
  std::optional<double> h_low, h_high;
  bool origin_stop = false;
  cmd_sim->add_option("--theta1", theta1, "");
  cmd_sim->add_option("--theta2", theta2, "");
  cmd_sim->add_option("--domain", domain, "quadrant | strip")
      ->check(CLI::IsMember({"quadrant", "strip"}));
  cmd_sim->add_option("--drift", drift_name, "none | htransform | strip")
      ->check(CLI::IsMember({"none", "htransform", "strip"}));
  cmd_sim->add_option("--x0", x0, "");
  cmd_sim->add_option("--y0", y0, "");
  cmd_sim->add_option("--seed", seed, "");
  cmd_sim->add_option("--T", horizon, "");
  cmd_sim->add_option("--dt", dt, "");
  cmd_sim->add_option("--h-low", h_low, "stop when h reaches this level from above");
  cmd_sim->add_option("--h-high", h_high, "stop when h reaches this level from below");
  cmd_sim->add_flag("--stop-at-origin-guard", origin_stop, "stop inside |x| < 10 sqrt(dt)");
  cmd_sim->add_option("-o,--out", out, "trajectory CSV path");

  // --- couple ---------------------------------------------------------
  auto* cmd_couple = app.add_subcommand("couple", "two solutions off one driver");
  bool deterministic = false;
  int cycles = 1;
  std::string gap_csv;
  cmd_couple->add_option("--theta1", theta1, "");
  cmd_couple->add_option("--theta2", theta2, "");
  cmd_couple->add_option("--eta", eta, "initial horizontal offset");
  cmd_couple->add_flag("--deterministic", deterministic,
                       "use the piecewise-linear amplification cycle driver");
  cmd_couple->add_option("--cycles", cycles, "cycles (deterministic driver)");
  cmd_couple->add_option("--seed", seed, "Brownian driver seed");
  cmd_couple->add_option("--T", horizon, "Brownian horizon");
  cmd_couple->add_option("--dt", dt, "");
  cmd_couple->add_option("--x0", x0, "start x (Brownian mode)");
  cmd_couple->add_option("--y0", y0, "start y (Brownian mode)");
  cmd_couple->add_option("--gap-csv", gap_csv, "also write the gap series CSV here");
  cmd_couple->add_option("-o,--out", out, "report JSON path");

  // --- verify ---------------------------------------------------------
  auto* cmd_verify = app.add_subcommand("verify", "named verification suite");
  std::string suite;
  std::size_t replicas = 0;
  unsigned threads = 0;
  std::optional<double> ov_t1, ov_t2, ov_dt;
  std::uint64_t vseed = 20250601;
  cmd_verify
      ->add_option("--suite", suite,
                   "one of: identities lcp cycle-factor exit-law exit-time displacement "
                   "martingale hitting-law kappa-rate")
      ->required()
      ->check(CLI::IsMember(orbm::verify::suite_names()));
  cmd_verify->add_option("--theta1", ov_t1, "override the suite's angle pair");
  cmd_verify->add_option("--theta2", ov_t2, "");
  cmd_verify->add_option("--replicas", replicas, "Monte Carlo replicas / instances");
  cmd_verify->add_option("--seed", vseed, "seed base");
  cmd_verify->add_option("--dt", ov_dt, "override the suite's step");
  cmd_verify->add_option("--threads", threads, "worker threads (0 = hardware)");
  cmd_verify->add_option("-o,--out", out, "report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message and usage hint
    return 1;
  }

  try {
    if (cmd_params->parsed()) {
      json cfg = base_config("params");
      cfg["theta1"] = theta1;
      cfg["theta2"] = theta2;
      const DerivedParams p = derive({theta1, theta2});
      json j;
      j["config"] = cfg;
      j["params"] = to_json(p);
      j["label"] = to_string(classify(p));
      j["analytics"] = (theta1 + theta2 > 0 && theta1 > 0 && theta1 < kHalfPi)
                           ? analytics_table(theta1, theta2)
                           : json();
      write_text(out.empty() ? "-" : out, j.dump(2) + "\n");
      return 0;
    }

    if (cmd_region->parsed()) {
      json cfg = base_config("region");
      cfg["res"] = res;
      cfg["theta1_min"] = t1_min;
      cfg["theta1_max"] = t1_max;
      cfg["theta2_min"] = t2_min;
      cfg["theta2_max"] = t2_max;
      const auto grid = region_grid(t1_min, t1_max, t2_min, t2_max, res);
      std::ostringstream os;
      write_region_csv(os, grid, cfg);
      write_text(out_path("region.csv", out), os.str());
      return 0;
    }

    if (cmd_reflect->parsed()) {
      json cfg = base_config("reflect");
      cfg["theta1"] = theta1;
      cfg["theta2"] = theta2;
      cfg["domain"] = domain;
      cfg["x0"] = x0;
      cfg["y0"] = y0;
      const ReflectionSpec spec = domain == "quadrant"
                                      ? ReflectionSpec::quadrant_for({theta1, theta2})
                                      : ReflectionSpec::strip_for({theta1, theta2});
      DrivingPath driver;
      if (!driver_path.empty()) {
        std::ifstream is(driver_path);
        if (!is) throw std::runtime_error("cannot open driver CSV " + driver_path);
        driver = read_driver_csv(is);
        cfg["driver"] = driver_path;
      } else {
        driver = brownian_driver(seed, horizon, dt);
        cfg["seed"] = seed;
        cfg["T"] = horizon;
        cfg["dt"] = dt;
      }
      const ReflectedPath path = solve_path(driver, {x0, y0}, spec);
      std::ostringstream os;
      write_path_csv(os, path, cfg);
      write_text(out_path("path.csv", out), os.str());
      return 0;
    }

    if (cmd_sim->parsed()) {
      json cfg = base_config("simulate");
      cfg["theta1"] = theta1;
      cfg["theta2"] = theta2;
      cfg["domain"] = domain;
      cfg["drift"] = drift_name;
      cfg["x0"] = x0;
      cfg["y0"] = y0;
      cfg["seed"] = seed;
      cfg["T"] = horizon;
      cfg["dt"] = dt;
      const ReflectionSpec spec = domain == "quadrant"
                                      ? ReflectionSpec::quadrant_for({theta1, theta2})
                                      : ReflectionSpec::strip_for({theta1, theta2});
      const MapSpec map = MapSpec::from_angles({theta1, theta2});
      DriftSpec drift = DriftSpec::none();
      if (drift_name == "htransform") drift = DriftSpec::h_transform(map);
      if (drift_name == "strip") drift = DriftSpec::strip_conditioned();
      StopRules rules;
      rules.map = map;
      rules.h_low = h_low;
      rules.h_high = h_high;
      rules.stop_at_origin_guard = origin_stop || drift_name == "htransform";
      if (h_low) cfg["h_low"] = *h_low;
      if (h_high) cfg["h_high"] = *h_high;
      const Trajectory traj =
          simulate({x0, y0}, spec, drift, brownian_driver(seed, horizon, dt), rules);
      std::ostringstream os;
      write_trajectory_csv(os, traj, cfg);
      write_text(out_path("trajectory.csv", out), os.str());
      return 0;
    }

    if (cmd_couple->parsed()) {
      json cfg = base_config("couple");
      cfg["theta1"] = theta1;
      cfg["theta2"] = theta2;
      cfg["eta"] = eta;
      cfg["dt"] = dt;
      const DerivedParams p = derive({theta1, theta2});
      const ReflectionSpec spec = ReflectionSpec::quadrant(p.a1, p.a2);
      CouplingReport rep;
      if (deterministic) {
        cfg["cycles"] = cycles;
        const CycleDriver cd = cycle_driver(p, eta, 0.1 * eta, cycles, 1.0, dt);
        rep = run_pair(cd.driver, cd.x0, cd.y0, spec);
      } else {
        cfg["seed"] = seed;
        cfg["T"] = horizon;
        cfg["x0"] = x0;
        cfg["y0"] = y0;
        const DrivingPath d = brownian_driver(seed, horizon, dt);
        rep = run_pair(d, {x0, y0}, {x0 + eta, y0}, spec);
      }
      json j;
      j["config"] = cfg;
      if (!gap_csv.empty()) {
        std::ostringstream os;
        os << "t,gap_x,gap_y\n";
        for (std::size_t k = 0; k < rep.gap.size(); ++k)
          os << format_double(static_cast<double>(k * rep.gap_stride) * dt) << ','
             << format_double(rep.gap[k].x) << ',' << format_double(rep.gap[k].y) << "\n";
        write_text(gap_csv, os.str());
        j["gap_csv_path"] = gap_csv;
      }
      json events = json::array();
      for (const StageEvent& e : rep.stage_events)
        events.push_back({{"index", e.index},
                          {"type", to_string(e.type)},
                          {"path", e.path},
                          {"gap_x", e.gap.x},
                          {"gap_y", e.gap.y},
                          {"angle_dev", e.angle_dev}});
      j["stage_events"] = events;
      j["factors"] = {{"upper", rep.factors_upper}, {"lower", rep.factors_lower}};
      j["cycle_factors"] = rep.cycle_factors;
      j["cycle_factor"] = rep.cycle_factors.empty() ? json() : json(rep.cycle_factors.front());
      j["identical"] = rep.identical;
      j["tandem_violations"] = rep.tandem_violations;
      j["expected"] = {{"stage_upper", -p.a2}, {"stage_lower", p.a1}, {"cycle", p.beta}};
      write_text(out.empty() ? "-" : out, j.dump(2) + "\n");
      return 0;
    }

    if (cmd_verify->parsed()) {
      orbm::verify::VerifyConfig vcfg;
      vcfg.seed = vseed;
      vcfg.threads = threads;
      vcfg.theta1 = ov_t1;
      vcfg.theta2 = ov_t2;
      vcfg.dt = ov_dt;
      if (replicas) vcfg.replicas = replicas;
      const orbm::verify::SuiteResult result = orbm::verify::run_suite(suite, vcfg);
      json cfg = base_config("verify");
      cfg["suite"] = suite;
      cfg["seed"] = vseed;
      cfg["threads"] = threads;
      if (ov_t1) cfg["theta1"] = *ov_t1;
      if (ov_t2) cfg["theta2"] = *ov_t2;
      if (ov_dt) cfg["dt"] = *ov_dt;
      if (replicas) cfg["replicas"] = replicas;
      json checks = json::array();
      bool pass = true;
      for (const auto& c : result.checks) {
        checks.push_back({{"name", c.name},
                          {"target", c.target},
                          {"estimate", c.estimate},
                          {"tolerance", c.tolerance},
                          {"verdict", c.pass ? "pass" : "fail"},
                          {"note", c.note}});
        pass = pass && c.pass;
      }
      json j;
      j["config"] = cfg;
      j["suite"] = suite;
      j["checks"] = checks;
      j["verdict"] = pass ? "pass" : "fail";
      write_text(out.empty() ? "-" : out, j.dump(2) + "\n");
      if (!pass) {
        for (const auto& c : result.checks)
          if (!c.pass) std::cerr << "FAIL " << c.name << "\n";
        return 2;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
