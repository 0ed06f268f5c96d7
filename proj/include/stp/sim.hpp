#ifndef STP_SIM_HPP
#define STP_SIM_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stp/heuristic.hpp"
#include "stp/obstacles.hpp"
#include "stp/planner.hpp"
#include "stp/replan.hpp"

namespace stp {

struct AgentParams {
  double desired_speed = 12.0;  // [m/s]
  double headway = 1.5;         // time headway [s]
  double accel = 1.0;           // IDM a [m/s^2]
  double comfort_decel = 2.0;   // IDM b [m/s^2]
  double min_gap = 2.0;         // standstill gap [m]
};

struct AgentState {
  double s = 0.0;
  double v = 0.0;
  int lane = 1;
  double length = 4.5;
  AgentParams params;
};

struct EgoSetup {
  double s0 = 0.0;
  double v0 = 0.0;
  int lane = 1;
};

struct Scenario {
  std::string name;
  double road_length = 750.0;
  int n_lanes = 1;
  RoadProfile profile;  // slopes and speed limits (zones already folded in)
  std::vector<TrafficLightObstacle> lights;
  std::vector<SpeedLimitZone> limits;
  std::vector<LaneChangeBan> bans;
  std::vector<AgentState> agents;
  EgoSetup ego;
  VehicleParams vehicle;
  GridSpec grid;
  PlannerConfig planner;
  ReplanConfig replan;
  RuleConfig rules;
  double goal_s = 750.0;  // route goal, a grid multiple >= road_length
  std::uint64_t seed = 1;

  void validate() const;
};

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text);

// IDM car following toward the nearer of the in-lane leader, the ego (when
// it overlaps the agent's lane), or a virtual stopped leader at the next red
// stop line. Agents never change lanes. Semi-implicit integration, v >= 0.
void step_agents(std::vector<AgentState>& agents,
                 const std::vector<TrafficLightObstacle>& lights, double dt,
                 double t_now, const TrajectoryState* ego = nullptr,
                 double ego_length = 0.0);

enum class PerceptionMode {
  exact,        // observations equal ground truth
  alternating,  // worst-case +/- ds_max error, sign flipping per cycle
};

struct SimOptions {
  HeuristicKind heuristic = HeuristicKind::dp;
  std::uint64_t seed = 0;  // 0 = use scenario seed
  std::optional<std::pair<double, double>> perturb;  // sigma_s [m], sigma_v [m/s]
  PerceptionMode perception = PerceptionMode::exact;
  double tick = 0.01;       // [s]
  double max_time = 300.0;  // wall on simulated time [s]
  bool record_ticks = true;
  bool allow_lane_change = true;
  bool capture_traces = false;  // keep per-cycle search traces (plan command)
};

struct TickRow {
  double t, s, l, v, a, cum_cost;
};

struct ReplanRecord {
  int cycle = 0;
  double t0 = 0.0;
  double anchor_t = 0.0, anchor_s = 0.0, anchor_l = 0.0, anchor_v = 0.0;
  long nodes_expanded = 0;
  Termination termination = Termination::horizon_reached;
  bool fallback = false;
  double reached_progress = 0.0;
  double wall_seconds = 0.0;  // excluded from deterministic artifacts
};

struct SimLog {
  std::string scenario;
  std::string heuristic;
  std::uint64_t seed = 0;
  std::vector<TickRow> ticks;
  std::vector<ReplanRecord> cycles;
  bool completed = false;
  bool aborted = false;
  std::string abort_reason;
  double travel_time = 0.0;      // [s], valid when completed
  double total_cost = 0.0;       // [J], drive energy + lane-change penalties
  int lane_changes = 0;
  double end_time = 0.0;

  double mean_nodes() const;
  double stddev_nodes() const;
  double mean_plan_seconds() const;
  double stddev_plan_seconds() const;
};

SimLog run(const Scenario& sc, const SimOptions& opt);

}  // namespace stp

#endif  // STP_SIM_HPP
