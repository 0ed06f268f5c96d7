#ifndef STP_IO_HPP
#define STP_IO_HPP

#include <string>

#include "stp/heuristic.hpp"
#include "stp/planner.hpp"
#include "stp/sim.hpp"

namespace stp {

// All numeric output is written with six significant digits so logs are
// byte-stable under re-runs with the same seed.
std::string fmt6(double v);

std::string trajectory_to_csv(const Trajectory& traj);
std::string trace_to_csv(const SearchTrace& trace);
std::string cost_to_go_to_csv(const CostToGoMap& map);
std::string ticks_to_csv(const SimLog& log);
// Deterministic summary: everything except wall-clock timing.
std::string simlog_to_json(const SimLog& log);
// Wall-clock planning time per cycle (non-deterministic by nature).
std::string timing_to_csv(const SimLog& log);

void write_file(const std::string& path, const std::string& content);

}  // namespace stp

#endif  // STP_IO_HPP
