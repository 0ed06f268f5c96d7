#include "stp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace stp {

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t_start,t_end,s_start,s_end,v_start,v_end,a,l_start,l_end\n";
  for (const auto& seg : traj.segments)
    out << fmt6(seg.t_start) << ',' << fmt6(seg.t_end) << ','
        << fmt6(seg.s_start) << ',' << fmt6(seg.s_end()) << ','
        << fmt6(seg.v_start) << ',' << fmt6(seg.v_end) << ',' << fmt6(seg.a)
        << ',' << fmt6(seg.l_start) << ',' << fmt6(seg.l_end) << '\n';
  return out.str();
}

std::string trace_to_csv(const SearchTrace& trace) {
  std::ostringstream out;
  out << "t,s,l,v,g,f,parent\n";
  for (const auto& row : trace)
    out << fmt6(row.t) << ',' << fmt6(row.s) << ',' << fmt6(row.l) << ','
        << fmt6(row.v) << ',' << fmt6(row.g) << ',' << fmt6(row.f) << ','
        << row.parent << '\n';
  return out.str();
}

std::string cost_to_go_to_csv(const CostToGoMap& map) {
  std::ostringstream out;
  out << "s,v,cost\n";
  for (int i = 0; i <= map.rows; ++i)
    for (int k = 0; k <= map.v_steps; ++k) {
      const double j = map.at(i, k);
      out << fmt6(i * map.ds) << ',' << fmt6(k * map.dv) << ','
          << (std::isfinite(j) ? fmt6(j) : "inf") << '\n';
    }
  return out.str();
}

std::string ticks_to_csv(const SimLog& log) {
  std::ostringstream out;
  out << "t,s,l,v,a,cum_cost\n";
  for (const auto& row : log.ticks)
    out << fmt6(row.t) << ',' << fmt6(row.s) << ',' << fmt6(row.l) << ','
        << fmt6(row.v) << ',' << fmt6(row.a) << ',' << fmt6(row.cum_cost)
        << '\n';
  return out.str();
}

std::string simlog_to_json(const SimLog& log) {
  nlohmann::ordered_json j;
  j["scenario"] = log.scenario;
  j["heuristic"] = log.heuristic;
  j["seed"] = log.seed;
  j["completed"] = log.completed;
  j["aborted"] = log.aborted;
  if (log.aborted) j["abort_reason"] = log.abort_reason;
  j["travel_time_s"] = fmt6(log.travel_time);
  j["total_cost_kJ"] = fmt6(log.total_cost / 1000.0);
  j["lane_changes"] = log.lane_changes;
  j["end_time_s"] = fmt6(log.end_time);
  j["nodes_expanded_mean"] = fmt6(log.mean_nodes());
  j["nodes_expanded_stddev"] = fmt6(log.stddev_nodes());
  nlohmann::ordered_json cycles = nlohmann::ordered_json::array();
  for (const auto& c : log.cycles) {
    nlohmann::ordered_json rec;
    rec["cycle"] = c.cycle;
    rec["t0"] = fmt6(c.t0);
    rec["anchor_t"] = fmt6(c.anchor_t);
    rec["anchor_s"] = fmt6(c.anchor_s);
    rec["anchor_l"] = fmt6(c.anchor_l);
    rec["anchor_v"] = fmt6(c.anchor_v);
    rec["nodes_expanded"] = c.nodes_expanded;
    rec["termination"] = to_string(c.termination);
    rec["fallback"] = c.fallback;
    rec["progress"] = fmt6(c.reached_progress);
    cycles.push_back(rec);
  }
  j["cycles"] = cycles;
  return j.dump(2) + "\n";
}

std::string timing_to_csv(const SimLog& log) {
  std::ostringstream out;
  out << "cycle,planning_wall_ms\n";
  for (const auto& c : log.cycles)
    out << c.cycle << ',' << fmt6(c.wall_seconds * 1000.0) << '\n';
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace stp
