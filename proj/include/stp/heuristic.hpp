#ifndef STP_HEURISTIC_HPP
#define STP_HEURISTIC_HPP

#include <vector>

#include "stp/spacetime.hpp"
#include "stp/vehicle.hpp"

namespace stp {

// Exact cost-to-go of the relaxed (time-invariant, single-lane) problem on
// the (s, v) grid. Built once per route by backward dynamic programming and
// queried as an admissible heuristic. Infeasible states hold +inf.
struct CostToGoMap {
  double ds = 10.0;
  double dv = 1.0;
  double goal_s = 0.0;
  int rows = 0;     // s index range [0, rows], row i at s = i*ds
  int v_steps = 0;  // v index range [0, v_steps]
  std::vector<double> values;       // (rows+1) x (v_steps+1), row-major
  std::vector<double> terminal_v;   // velocities with zero terminal cost
  bool all_infeasible = false;

  double at(int s_idx, int v_idx) const {
    return values[static_cast<std::size_t>(s_idx) * (v_steps + 1) + v_idx];
  }
  double& at(int s_idx, int v_idx) {
    return values[static_cast<std::size_t>(s_idx) * (v_steps + 1) + v_idx];
  }
};

// Backward DP over (s, v) with stride ds_grid. Only time-invariant
// constraints (speed limits from the profile, acceleration limits) are
// considered, and regeneration is clamped to zero so every edge weight is
// non-negative. terminal_v_set empty means any arrival velocity is a goal.
CostToGoMap build_cost_to_go(const VehicleParams& vp,
                             const RoadProfile& profile, const GridSpec& gs,
                             double goal_s,
                             const std::vector<double>& terminal_v_set = {});

// Value at the next grid row at or beyond s (a lower bound on the remaining
// cost, since reaching that row costs a non-negative amount). v must lie on
// the velocity grid. Positions past the goal return 0.
double query_dp(const CostToGoMap& map, double s, double v);

// Model-based analytic lower bound: remaining distance at the per-meter
// grade/rolling force floor minus the recoverable kinetic energy (floored at
// zero), plus the auxiliary draw over the fastest legal pace. Dominated by
// query_dp at every grid state.
double query_mb(const VehicleParams& vp, const RoadProfile& profile, double s,
                double v, double goal_s);

// Uniform-cost baseline.
double query_zero(double s, double v);

enum class HeuristicKind { dp, mb, zero };

const char* to_string(HeuristicKind k);
HeuristicKind heuristic_kind_from_string(const std::string& name);

// Bound heuristic with precomputed parameters for the hot query path.
class Heuristic {
 public:
  Heuristic() = default;
  static Heuristic make(HeuristicKind kind, const CostToGoMap* map,
                        const VehicleParams& vp, const RoadProfile& profile,
                        double goal_s);

  double operator()(double s, double v) const;
  HeuristicKind kind() const { return kind_; }

 private:
  HeuristicKind kind_ = HeuristicKind::zero;
  const CostToGoMap* map_ = nullptr;
  double force_floor_ = 0.0;  // [N]
  double half_mass_ = 0.0;
  double inv_eta_ = 1.0;
  double aux_per_m_ = 0.0;  // auxiliary draw over the fastest legal pace
  double goal_s_ = 0.0;
};

}  // namespace stp

#endif  // STP_HEURISTIC_HPP
