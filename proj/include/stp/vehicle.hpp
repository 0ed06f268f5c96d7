#ifndef STP_VEHICLE_HPP
#define STP_VEHICLE_HPP

#include <vector>

#include "stp/spacetime.hpp"

namespace stp {

inline constexpr double kGravity = 9.81;  // [m/s^2]

// Point-mass longitudinal model with constant drivetrain efficiencies.
// cost_trans covers traction energy only; the constant auxiliary draw p_aux
// is charged per unit time by the planning cost and the simulation metrics,
// and is what makes progress worthwhile under an energy objective.
struct VehicleParams {
  double m = 1500.0;       // mass [kg]
  double c_rr = 0.01;      // rolling-resistance coefficient [-]
  double c_dA = 0.62;      // drag area c_d * A [m^2]
  double rho = 1.2;        // air density [kg/m^3]
  double eta_drive = 0.9;  // drivetrain efficiency (0, 1]
  double eta_regen = 0.3;  // regeneration efficiency [0, 1]
  double a_min = -3.0;     // braking limit [m/s^2]
  double a_max = 1.5;      // acceleration limit [m/s^2]
  double t_lc = 4.0;       // lane-change duration [s]
  double c_lc = 5000.0;    // constant cost per lane change [J]
  double p_aux = 800.0;    // auxiliary electrical draw [W]

  void validate() const;
};

// Piecewise-constant road description sampled along s. Slope and speed limit
// of the last sample at or before s apply until the next sample.
struct RoadProfile {
  struct Sample {
    double s = 0.0;          // [m], strictly increasing
    double slope = 0.0;      // [rad]
    double speed_limit = 0;  // [m/s]
  };
  std::vector<Sample> samples;

  void validate() const;
  double slope_at(double s) const;
  double speed_limit_at(double s) const;
  // Minimum grade+rolling force coefficient over the route: min(c_rr*cos + sin).
  double min_grade_rolling(double c_rr) const;
};

// F_r = m*g*(c_rr*cos(slope) + sin(slope)) + 0.5*rho*c_dA*v^2
double resistive_force(const VehicleParams& vp, double v, double slope);

struct Transition {
  double dt = 0.0;  // [s]
  double ds = 0.0;  // [m]
  double a = 0.0;   // [m/s^2]
};

// Expansion kinematics: uniform acceleration from v_i to v_f, ending on the
// time limit when the mean velocity is below ds_exp/dt_exp and on the
// distance limit otherwise. v_i = v_f = 0 is the legal waiting move.
Transition transition(double v_i, double v_f, const GridSpec& gs);

// Energy of a constant-acceleration transition: integral of motor power with
// positive power divided by eta_drive and negative power credited times
// eta_regen, evaluated in closed form with a split at the power sign change.
double cost_trans(const VehicleParams& vp, double v_i, double v_f, double dt,
                  double slope);

bool check_internal_limits(const VehicleParams& vp, double a, double v_f,
                           const GridSpec& gs);

// Lane-change increment for a segment of duration dt, clamped so cumulative
// progress never exceeds one full lane.
double lane_change_progress(double dt, double t_lc, double progress_so_far = 0.0);

// Drive energy of the trajectory over [t1, t2] (closed-form per sub-segment;
// excludes lane-change penalties).
double trajectory_energy(const Trajectory& traj, const VehicleParams& vp,
                         const RoadProfile& profile, double t1, double t2);

}  // namespace stp

#endif  // STP_VEHICLE_HPP
