#ifndef STP_REPLAN_HPP
#define STP_REPLAN_HPP

#include <optional>
#include <vector>

#include "stp/obstacles.hpp"
#include "stp/planner.hpp"

namespace stp {

struct ReplanConfig {
  double t_rep = 1.0;   // replanning period [s]
  double t_plan = 1.0;  // guaranteed planning-time upper bound [s]
  PredictionConfig pc;

  void validate(double planner_t_hor) const;
};

struct VehicleObservation {
  double s = 0.0;
  double v = 0.0;
  double lane = 1.0;
  double length = 5.0;
};

// Constant-velocity prediction with the step safety buffer for every
// observation; time-invariant obstacles pass through from the map data.
ObstacleSet predict(const std::vector<VehicleObservation>& observations,
                    double t0, const ObstacleSet& static_obstacles);

struct ReplanOutcome {
  Trajectory trajectory;  // anchored at t0 + t_plan (t0 on the first cycle)
  PlanResult plan_result;
  bool fallback = false;  // plan failed; trajectory is the stop profile
  double anchor_t = 0.0;
  PlanStart anchor;
};

// One MPC cycle: anchor at the state the ego will occupy after t_plan on the
// previous trajectory, plan from there, fall back to a maximal-deceleration
// stop when planning fails. `previous == nullptr` is the bootstrap cycle:
// the measured state is used directly and t_plan is treated as zero.
ReplanOutcome replan_step(double t0, const Trajectory* previous,
                          const PlanStart& measured, const ObstacleSet& obs,
                          const Heuristic& h, const ReplanConfig& rcfg,
                          const PlannerConfig& pcfg, const GridSpec& gs,
                          const VehicleParams& vp, const RuleConfig& rc,
                          const RoadProfile& profile,
                          SearchTrace* trace = nullptr);

// Truncates `old_traj` at t_switch and appends `new_traj` (which must start
// there). Throws std::runtime_error when the states at t_switch disagree by
// more than half a grid step in s or v, or measurably in l.
Trajectory stitch(const Trajectory& old_traj, const Trajectory& new_traj,
                  double t_switch, const GridSpec& gs);

}  // namespace stp

#endif  // STP_REPLAN_HPP
