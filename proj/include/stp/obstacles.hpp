#ifndef STP_OBSTACLES_HPP
#define STP_OBSTACLES_HPP

#include <optional>
#include <string>
#include <vector>

#include "stp/spacetime.hpp"

namespace stp {

// Linearized prediction of another vehicle: observed at t0, assumed to hold
// its velocity and lane. Occupies the whole lane; the ego length is folded
// into the longitudinal half-extent, so the ego is treated as a point.
struct VehicleObstacle {
  double s0 = 0.0;      // observed center position at t0 [m]
  double v0 = 0.0;      // observed velocity [m/s]
  double lane = 1.0;    // lane coordinate (constant prediction)
  double length = 5.0;  // vehicle length [m]
  double t0 = 0.0;      // observation time [s]

  double center_at(double t) const { return s0 + v0 * (t - t0); }
};

struct TrafficLightObstacle {
  struct Phase {
    double offset = 0.0;    // red start within the cycle (or absolute) [s]
    double duration = 0.0;  // red duration [s]
  };
  double s = 0.0;              // stop-line position [m]
  std::vector<int> lanes;      // affected lane indices
  std::vector<Phase> phases;   // red intervals
  std::optional<double> period;  // cycle period [s]; empty = aperiodic

  bool is_red(double t, double lane_coord) const;
};

struct SpeedLimitZone {
  double s = 0.0;        // zone start [m]
  double length = 0.0;   // zone length [m]
  double v_limit = 0.0;  // velocities >= v_limit violate inside the zone
};

enum class BanDirection { both, left_only, right_only };

struct LaneChangeBan {
  double s = 0.0;
  double length = 0.0;
  int boundary = 1;  // ban applies between lanes `boundary` and `boundary`+1
  BanDirection direction = BanDirection::both;
};

struct RuleConfig {
  double l_ego = 5.0;    // ego length [m]
  double dv_ov = 3.0;    // minimum overtaking speed surplus [m/s]
  bool no_right_overtake = false;
  bool enforce_min_overtake_speed = false;
};

struct PredictionConfig {
  double ds_max = 1.0;  // worst-case relative-distance estimation error [m]
  double t_rep = 1.0;   // replanning period [s]
  double t_hor = 14.0;  // obstacle validity horizon beyond t0 [s]

  void validate() const;
};

struct ObstacleSet {
  std::vector<VehicleObstacle> vehicles;
  std::vector<TrafficLightObstacle> lights;
  std::vector<SpeedLimitZone> limits;
  std::vector<LaneChangeBan> bans;
};

struct CollisionReport {
  bool pass = true;
  std::string violator;  // first violating obstacle, e.g. "vehicle 2"
};

// Step-shaped safety buffer around the linearized prediction (lower, upper):
// center(t) -/+ (L_S + s_b(t)) with s_b = ds_max before t0 + t_rep and
// 3*ds_max afterwards, valid up to t0 + t_hor.
std::pair<double, double> vehicle_bounds(const VehicleObstacle& o,
                                         const RuleConfig& rc,
                                         const PredictionConfig& pc, double t);

bool check_vehicle_collision(const TrajectorySegment& seg,
                             const VehicleObstacle& o, const RuleConfig& rc,
                             const PredictionConfig& pc);

// True iff the segment violates the right-overtake ban or the minimum
// left-overtake speed surplus (whichever flags are enabled).
bool check_overtaking_rules(const TrajectorySegment& seg,
                            const VehicleObstacle& o, const RuleConfig& rc,
                            const PredictionConfig& pc);

bool check_traffic_light(const TrajectorySegment& seg,
                         const TrafficLightObstacle& tl);

bool check_speed_limit(const TrajectorySegment& seg, const SpeedLimitZone& z);

bool check_lane_ban(const TrajectorySegment& seg, const LaneChangeBan& b);

CollisionReport check_all(const TrajectorySegment& seg, const ObstacleSet& obs,
                          const RuleConfig& rc, const PredictionConfig& pc);

CollisionReport check_all(const Trajectory& traj, const ObstacleSet& obs,
                          const RuleConfig& rc, const PredictionConfig& pc);

}  // namespace stp

#endif  // STP_OBSTACLES_HPP
