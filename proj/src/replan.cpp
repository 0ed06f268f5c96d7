#include "stp/replan.hpp"

#include <cmath>
#include <stdexcept>

namespace stp {

void ReplanConfig::validate(double planner_t_hor) const {
  if (!(0 < t_plan && t_plan <= t_rep))
    throw std::invalid_argument("ReplanConfig: need 0 < t_plan <= t_rep");
  if (!(t_rep < pc.t_hor))
    throw std::invalid_argument("ReplanConfig: need t_rep < prediction t_hor");
  // Child segments may overrun the pop-time horizon by one expansion; the
  // prediction window has to cover every query the search can issue.
  if (pc.t_hor + 1e-9 < t_plan + planner_t_hor)
    throw std::invalid_argument(
        "ReplanConfig: prediction t_hor must cover t_plan + planner t_hor");
}

ObstacleSet predict(const std::vector<VehicleObservation>& observations,
                    double t0, const ObstacleSet& static_obstacles) {
  ObstacleSet out;
  out.lights = static_obstacles.lights;
  out.limits = static_obstacles.limits;
  out.bans = static_obstacles.bans;
  out.vehicles.reserve(observations.size());
  for (const auto& ob : observations)
    out.vehicles.push_back(VehicleObstacle{ob.s, ob.v, ob.lane, ob.length, t0});
  return out;
}

namespace {

PlanStart anchor_from(const Trajectory& previous, double t_anchor) {
  const TrajectoryState st = previous.state_at(t_anchor);
  PlanStart a;
  a.t = t_anchor;
  a.s = st.s;
  a.l = st.l;
  a.v = st.v;
  const bool fractional = std::abs(st.l - std::round(st.l)) > 1e-9;
  if (!fractional) {
    a.l = std::round(st.l);
    a.l_dir = LaneDir::none;
  } else if (st.l_rate > 1e-12) {
    a.l_dir = LaneDir::left;
  } else if (st.l_rate < -1e-12) {
    a.l_dir = LaneDir::right;
  } else {
    // Frozen mid-change (degraded profile): finish toward the nearer lane.
    a.l_dir = (st.l - std::floor(st.l) >= 0.5) ? LaneDir::left : LaneDir::right;
  }
  return a;
}

}  // namespace

ReplanOutcome replan_step(double t0, const Trajectory* previous,
                          const PlanStart& measured, const ObstacleSet& obs,
                          const Heuristic& h, const ReplanConfig& rcfg,
                          const PlannerConfig& pcfg, const GridSpec& gs,
                          const VehicleParams& vp, const RuleConfig& rc,
                          const RoadProfile& profile, SearchTrace* trace) {
  ReplanOutcome out;
  out.anchor_t = previous ? t0 + rcfg.t_plan : t0;

  if (previous && !previous->covers(out.anchor_t)) {
    // The previous plan ran out before the hand-over point; degrade from its
    // final state.
    const TrajectoryState st = previous->state_at(previous->end_time());
    PlanStart from;
    from.t = previous->end_time();
    from.s = st.s;
    from.l = st.l;
    from.v = st.v;
    out.anchor_t = from.t;  // hand over where the old plan ends
    out.anchor = from;
    out.trajectory = stop_profile(from, vp, profile, from.t + pcfg.t_hor);
    out.fallback = true;
    return out;
  }

  out.anchor = previous ? anchor_from(*previous, out.anchor_t) : measured;
  try {
    out.plan_result = plan(out.anchor, obs, h, pcfg, gs, vp, rc, rcfg.pc,
                           profile, trace);
    out.trajectory = out.plan_result.trajectory;
    out.fallback = out.plan_result.degraded;
  } catch (const std::exception&) {
    out.trajectory = stop_profile(out.anchor, vp, profile,
                                  out.anchor_t + pcfg.t_hor);
    out.fallback = true;
  }
  return out;
}

Trajectory stitch(const Trajectory& old_traj, const Trajectory& new_traj,
                  double t_switch, const GridSpec& gs) {
  if (!old_traj.covers(t_switch))
    throw std::runtime_error("stitch: old trajectory does not cover t_switch");
  if (new_traj.empty())
    throw std::runtime_error("stitch: new trajectory is empty");
  if (std::abs(new_traj.start_time() - t_switch) > 1e-6)
    throw std::runtime_error("stitch: new trajectory does not start at t_switch");

  const TrajectoryState old_st = old_traj.state_at(t_switch);
  const TrajectoryState new_st = new_traj.state_at(t_switch);
  if (std::abs(old_st.s - new_st.s) > 0.5 * gs.ds_grid + 1e-9)
    throw std::runtime_error("stitch: s mismatch at t_switch");
  if (std::abs(old_st.v - new_st.v) > 0.5 * gs.dv + 1e-9)
    throw std::runtime_error("stitch: v mismatch at t_switch");
  if (std::abs(old_st.l - new_st.l) > 1e-6)
    throw std::runtime_error("stitch: l mismatch at t_switch");

  Trajectory out;
  for (const auto& seg : old_traj.segments) {
    if (seg.t_end <= t_switch + 1e-12) {
      if (seg.t_start < t_switch - 1e-12) out.segments.push_back(seg);
      continue;
    }
    if (seg.t_start >= t_switch - 1e-12) break;
    TrajectorySegment cut = seg;
    cut.t_end = t_switch;
    cut.v_end = seg.v_at(t_switch);
    cut.l_end = seg.l_at(t_switch);
    out.segments.push_back(cut);
    break;
  }
  for (const auto& seg : new_traj.segments) out.segments.push_back(seg);
  out.total_cost = new_traj.total_cost;
  return out;
}

}  // namespace stp
