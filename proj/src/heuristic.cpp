#include "stp/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

namespace stp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Velocity along a constant-acceleration edge as a function of distance.
double v_at_distance(double v_i, double a, double dist) {
  const double sq = v_i * v_i + 2.0 * a * dist;
  return sq > 0.0 ? std::sqrt(sq) : 0.0;
}

// True iff driving the edge [s_from, s_from+ds] with v(s) monotone between
// v_i and v_f stays strictly below the piecewise-constant speed limit.
bool edge_within_limits(const RoadProfile& profile, double s_from, double ds,
                        double v_i, double v_f, double a) {
  // Collect breakpoints of the limit function inside the edge.
  double s_prev = s_from;
  double v_prev = v_i;
  for (const auto& smp : profile.samples) {
    if (smp.s <= s_from || smp.s >= s_from + ds) continue;
    const double v_here = v_at_distance(v_i, a, smp.s - s_from);
    const double limit = profile.speed_limit_at(s_prev);
    if (std::max(v_prev, v_here) >= limit) return false;
    s_prev = smp.s;
    v_prev = v_here;
  }
  const double limit = profile.speed_limit_at(s_prev);
  return std::max(v_prev, v_f) < limit;
}

}  // namespace

CostToGoMap build_cost_to_go(const VehicleParams& vp,
                             const RoadProfile& profile, const GridSpec& gs,
                             double goal_s,
                             const std::vector<double>& terminal_v_set) {
  gs.validate();
  profile.validate();
  const double rows_f = goal_s / gs.ds_grid;
  if (goal_s <= 0 || std::abs(rows_f - std::round(rows_f)) > 1e-9)
    throw std::invalid_argument("build_cost_to_go: goal_s must be a positive grid multiple");

  CostToGoMap map;
  map.ds = gs.ds_grid;
  map.dv = gs.dv;
  map.goal_s = goal_s;
  map.rows = static_cast<int>(std::round(rows_f));
  map.v_steps = gs.v_steps();
  map.values.assign(static_cast<std::size_t>(map.rows + 1) * (map.v_steps + 1), kInf);

  if (terminal_v_set.empty()) {
    for (int k = 0; k <= map.v_steps; ++k) map.terminal_v.push_back(k * gs.dv);
  } else {
    for (double v : terminal_v_set) {
      const double idx = v / gs.dv;
      if (v < 0 || v > gs.v_max + 1e-9 || std::abs(idx - std::round(idx)) > 1e-9)
        throw std::invalid_argument("build_cost_to_go: terminal velocity off the grid");
      map.terminal_v.push_back(v);
    }
  }

  // Edge weights must be non-negative for the ceil-row query to stay a lower
  // bound, so the map never credits regeneration.
  VehicleParams vp_map = vp;
  vp_map.eta_regen = 0.0;

  for (double v : map.terminal_v) {
    const int vi = static_cast<int>(std::round(v / gs.dv));
    if (v < profile.speed_limit_at(goal_s)) map.at(map.rows, vi) = 0.0;
  }

  for (int i = map.rows - 1; i >= 0; --i) {
    const double s_i = i * gs.ds_grid;
    const double slope = profile.slope_at(s_i);
    const double limit_here = profile.speed_limit_at(s_i);
    for (int j = 0; j <= map.v_steps; ++j) {
      const double v_j = j * gs.dv;
      if (v_j >= limit_here) continue;  // speeding state, stays +inf
      double best = kInf;
      for (int k = 0; k <= map.v_steps; ++k) {
        const double v_k = k * gs.dv;
        const double v_bar = 0.5 * (v_j + v_k);
        if (v_bar <= 0.0) continue;  // cannot cover the stride
        const double a = (v_k * v_k - v_j * v_j) / (2.0 * gs.ds_grid);
        if (a < vp.a_min - 1e-12 || a > vp.a_max + 1e-12) continue;
        const double tail = map.at(i + 1, k);
        if (!std::isfinite(tail)) continue;
        if (!edge_within_limits(profile, s_i, gs.ds_grid, v_j, v_k, a)) continue;
        const double dt = gs.ds_grid / v_bar;
        const double cost = cost_trans(vp_map, v_j, v_k, dt, slope) + vp.p_aux * dt;
        best = std::min(best, cost + tail);
      }
      map.at(i, j) = best;
    }
  }

  bool any_terminal = false;
  for (int k = 0; k <= map.v_steps; ++k)
    if (std::isfinite(map.at(map.rows, k))) any_terminal = true;
  if (!any_terminal) {
    map.all_infeasible = true;
    std::cerr << "warning: cost-to-go map has no feasible terminal state; "
                 "all values are infinite\n";
  }
  return map;
}

double query_dp(const CostToGoMap& map, double s, double v) {
  const double vi_f = v / map.dv;
  const int vi = static_cast<int>(std::round(vi_f));
  if (std::abs(vi_f - vi) > 1e-6 || vi < 0 || vi > map.v_steps)
    throw std::domain_error("query_dp: v must lie on the velocity grid");
  if (s >= map.goal_s) return 0.0;
  const double row_f = s / map.ds;
  int row = static_cast<int>(std::ceil(row_f - 1e-9));
  if (row < 0) row = 0;
  if (row > map.rows) return 0.0;
  return map.at(row, vi);
}

namespace {
double max_profile_limit(const RoadProfile& profile) {
  double mx = 0.0;
  for (const auto& smp : profile.samples) mx = std::max(mx, smp.speed_limit);
  return mx;
}
}  // namespace

double query_mb(const VehicleParams& vp, const RoadProfile& profile, double s,
                double v, double goal_s) {
  const double remaining = goal_s - s;
  if (remaining <= 0.0) return 0.0;
  const double force_floor = vp.m * kGravity * profile.min_grade_rolling(vp.c_rr);
  const double traction =
      (force_floor * remaining - 0.5 * vp.m * v * v) / vp.eta_drive;
  // Covering the distance takes at least remaining / (fastest legal speed)
  // seconds of auxiliary draw.
  const double aux = vp.p_aux * remaining / max_profile_limit(profile);
  return std::max(0.0, traction) + aux;
}

double query_zero(double, double) { return 0.0; }

const char* to_string(HeuristicKind k) {
  switch (k) {
    case HeuristicKind::dp: return "dp";
    case HeuristicKind::mb: return "mb";
    case HeuristicKind::zero: return "zero";
  }
  return "?";
}

HeuristicKind heuristic_kind_from_string(const std::string& name) {
  if (name == "dp") return HeuristicKind::dp;
  if (name == "mb") return HeuristicKind::mb;
  if (name == "zero") return HeuristicKind::zero;
  throw std::invalid_argument("unknown heuristic: " + name);
}

Heuristic Heuristic::make(HeuristicKind kind, const CostToGoMap* map,
                          const VehicleParams& vp, const RoadProfile& profile,
                          double goal_s) {
  Heuristic h;
  h.kind_ = kind;
  h.map_ = map;
  h.force_floor_ = vp.m * kGravity * profile.min_grade_rolling(vp.c_rr);
  h.half_mass_ = 0.5 * vp.m;
  h.inv_eta_ = 1.0 / vp.eta_drive;
  h.aux_per_m_ = vp.p_aux / max_profile_limit(profile);
  h.goal_s_ = goal_s;
  if (kind == HeuristicKind::dp && map == nullptr)
    throw std::invalid_argument("Heuristic: dp kind requires a cost-to-go map");
  return h;
}

double Heuristic::operator()(double s, double v) const {
  switch (kind_) {
    case HeuristicKind::dp:
      return query_dp(*map_, s, v);
    case HeuristicKind::mb: {
      const double remaining = goal_s_ - s;
      if (remaining <= 0.0) return 0.0;
      return std::max(0.0,
                      (force_floor_ * remaining - half_mass_ * v * v) * inv_eta_) +
             aux_per_m_ * remaining;
    }
    case HeuristicKind::zero:
      return 0.0;
  }
  return 0.0;
}

}  // namespace stp
