#ifndef STP_PLANNER_HPP
#define STP_PLANNER_HPP

#include <string>
#include <vector>

#include "stp/heuristic.hpp"
#include "stp/obstacles.hpp"
#include "stp/spacetime.hpp"
#include "stp/vehicle.hpp"

namespace stp {

struct PlannerConfig {
  double s_hor = 100.0;   // distance horizon [m]
  double t_hor = 10.0;    // time horizon [s]
  double timeout = 10.0;  // wall-clock planning budget [s]
  HeuristicKind heuristic_kind = HeuristicKind::dp;
  bool allow_lane_change = true;

  void validate() const;
};

enum class Termination { horizon_reached, open_exhausted, timeout };

const char* to_string(Termination t);

struct PlanStart {
  double t = 0.0;
  double s = 0.0;
  double l = 1.0;
  double v = 0.0;
  LaneDir l_dir = LaneDir::none;  // must match fractional/integer l
};

struct PlanResult {
  Trajectory trajectory;
  long nodes_expanded = 0;
  double planning_time = 0.0;  // wall-clock [s]
  Termination termination = Termination::horizon_reached;
  double reached_progress = 0.0;  // fraction of the nearer horizon, capped at 1
  bool degraded = false;  // true when the returned trajectory is the fallback
};

// One row per expanded (closed) node, for search-tree dumps.
struct TraceRow {
  double t, s, l, v, g, f;
  std::int32_t parent;
};
using SearchTrace = std::vector<TraceRow>;

// Normalized horizon progress of a node relative to the start state:
// max(s_rel/S_hor, t_rel/T_hor), capped at 1. The incumbent best node is
// replaced on strictly greater progress, or on equal progress and lower f.
double horizon_progress(const SearchNode& n, const PlanStart& start,
                        const PlannerConfig& cfg, const GridSpec& gs);

// Expansion per the search rules: longitudinal variants to every grid
// velocity, lateral cloning (or lane-change continuation), internal-limit
// filtering, then collision filtering. Children carry parent = -1.
std::vector<SearchNode> expand(const SearchNode& n, const ObstacleSet& obs,
                               const Heuristic& h, const GridSpec& gs,
                               const VehicleParams& vp, const RuleConfig& rc,
                               const PredictionConfig& pc,
                               const RoadProfile& profile,
                               bool allow_lane_change = true);

// The constant-acceleration segment realized by moving from parent to child.
TrajectorySegment edge_segment(const SearchNode& parent,
                               const SearchNode& child, const GridSpec& gs);

Trajectory reconstruct(const std::vector<SearchNode>& arena,
                       std::int32_t leaf_idx, const GridSpec& gs);

// Maximal-deceleration stop followed by a hold, covering at least
// [start.t, cover_until_t]. Used for boxed-in starts and replan fallback.
Trajectory stop_profile(const PlanStart& start, const VehicleParams& vp,
                        const RoadProfile& profile, double cover_until_t);

PlanResult plan(const PlanStart& start, const ObstacleSet& obs,
                const Heuristic& h, const PlannerConfig& cfg,
                const GridSpec& gs, const VehicleParams& vp,
                const RuleConfig& rc, const PredictionConfig& pc,
                const RoadProfile& profile, SearchTrace* trace = nullptr);

}  // namespace stp

#endif  // STP_PLANNER_HPP
