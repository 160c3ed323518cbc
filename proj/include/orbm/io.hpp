// CSV / JSON artifact formats.
//
// Driver CSV columns: t,bx,by (values, not increments).  Reflected-path CSV:
// t,x,y,l_lower,l_upper.  Trajectory CSV appends a '#'-prefixed footer record
// with the stop reason.  Doubles are written with max_digits10 precision so
// the time grid round-trips bit exactly.  Lines starting with '#' carry
// metadata (the materialized run configuration) and are skipped on read.

#ifndef ORBM_IO_HPP_
#define ORBM_IO_HPP_

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbm/analytics.hpp"
#include "orbm/drivers.hpp"
#include "orbm/params.hpp"
#include "orbm/reflect.hpp"
#include "orbm/sim.hpp"
#include "orbm/version.hpp"

namespace orbm {

using json = nlohmann::json;

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{}) throw std::runtime_error("parse_double: bad field '" + s + "'");
  return v;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  return out;
}

}  // namespace detail

inline void write_driver_csv(std::ostream& os, const DrivingPath& d,
                             const json& config = json::object()) {
  if (!config.empty()) os << "# config " << config.dump() << "\n";
  os << "t,bx,by\n";
  for (std::size_t k = 0; k < d.size(); ++k)
    os << format_double(d.t[k]) << ',' << format_double(d.f[k].x) << ','
       << format_double(d.f[k].y) << "\n";
}

inline DrivingPath read_driver_csv(std::istream& is) {
  DrivingPath d;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    const auto f = detail::split_csv(line);
    if (f.size() != 3) throw std::runtime_error("read_driver_csv: expected 3 columns");
    d.t.push_back(parse_double(f[0]));
    d.f.push_back({parse_double(f[1]), parse_double(f[2])});
  }
  if (d.size() < 2) throw std::runtime_error("read_driver_csv: driver needs >= 2 samples");
  for (std::size_t k = 1; k < d.size(); ++k)
    if (!(d.t[k] > d.t[k - 1])) throw std::runtime_error("read_driver_csv: grid not increasing");
  if (d.f[0] != Vec2{0.0, 0.0})
    throw std::runtime_error("read_driver_csv: driver must start at (0,0)");
  return d;
}

inline void write_path_csv(std::ostream& os, const ReflectedPath& p,
                           const json& config = json::object()) {
  if (!config.empty()) os << "# config " << config.dump() << "\n";
  os << "t,x,y,l_lower,l_upper\n";
  for (std::size_t k = 0; k < p.size(); ++k)
    os << format_double(p.t[k]) << ',' << format_double(p.state[k].x) << ','
       << format_double(p.state[k].y) << ',' << format_double(p.l_lower[k]) << ','
       << format_double(p.l_upper[k]) << "\n";
}

inline ReflectedPath read_path_csv(std::istream& is) {
  ReflectedPath p;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = detail::split_csv(line);
    if (f.size() != 5) throw std::runtime_error("read_path_csv: expected 5 columns");
    p.t.push_back(parse_double(f[0]));
    p.state.push_back({parse_double(f[1]), parse_double(f[2])});
    p.l_lower.push_back(parse_double(f[3]));
    p.l_upper.push_back(parse_double(f[4]));
  }
  return p;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                                 const json& config = json::object()) {
  write_path_csv(os, traj.path, config);
  os << "# stop_reason " << to_string(traj.stop_reason) << "\n";
  os << "# stop_time " << format_double(traj.stop_time) << "\n";
  os << "# clipped_steps " << traj.clipped_steps << "\n";
  os << "# origin_entries " << traj.origin_entries << "\n";
}

inline json to_json(const McReport& r) {
  json j;
  j["estimate"] = r.estimate;
  j["std_error"] = r.std_error;
  j["n"] = r.n;
  j["seed_base"] = r.seed_base;
  j["flags"] = r.flags;
  return j;
}

inline json to_json(const DerivedParams& p) {
  json j;
  j["theta1"] = p.theta1;
  j["theta2"] = p.theta2;
  j["a1"] = p.a1;
  j["a2"] = p.a2;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["psi"] = p.psi;
  j["kappa"] = p.kappa;
  j["rho"] = p.rho;
  return j;
}

inline void write_region_csv(std::ostream& os, const std::vector<RegionNode>& grid,
                             const json& config = json::object()) {
  if (!config.empty()) os << "# config " << config.dump() << "\n";
  os << "theta1,theta2,a1,a2,alpha,beta,psi,kappa,label\n";
  for (const RegionNode& n : grid)
    os << format_double(n.theta1) << ',' << format_double(n.theta2) << ','
       << format_double(n.a1) << ',' << format_double(n.a2) << ',' << format_double(n.alpha)
       << ',' << format_double(n.beta) << ',' << format_double(n.psi) << ','
       << format_double(n.kappa) << ',' << to_string(n.label) << "\n";
}

// All closed-form constants for one angle pair, as consumed by the verify CLI.
inline json analytics_table(double theta1, double theta2) {
  const DerivedParams p = derive({theta1, theta2});
  const StripInterval iv = StripInterval::for_angles({theta1, theta2});
  const ExitTimeLegs legs = expected_exit_time_legs(theta1, theta2);
  json j;
  j["params"] = to_json(p);
  j["strip"] = {{"a", iv.a}, {"b", iv.b}};
  j["exit_law_up"] = exit_law_up(theta1, theta2);
  j["exit_law_down"] = exit_law_down(theta1, theta2);
  j["exit_law_up_strip_form"] = exit_law_up_strip_form(theta1, theta2);
  j["exit_law_down_strip_form"] = exit_law_down_strip_form(theta1, theta2);
  j["mean_lower_leg_local_time"] = mean_lower_leg_local_time(theta1, theta2);
  j["expected_leg_down_to_up"] = legs.down_to_up;
  j["expected_leg_up_to_down"] = legs.up_to_down;
  j["expected_cycle_time"] = legs.cycle;
  j["cycle_local_time_term"] = cycle_local_time_term(theta1, theta2);
  j["mean_cycle_displacement"] = mean_cycle_displacement(theta1, theta2);
  j["version"] = kVersion;
  return j;
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_file: cannot open " + path);
  os << contents;
}

}  // namespace orbm

#endif  // ORBM_IO_HPP_
