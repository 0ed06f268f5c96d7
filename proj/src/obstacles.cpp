#include "stp/obstacles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stp {

void PredictionConfig::validate() const {
  if (ds_max < 0) throw std::invalid_argument("PredictionConfig: ds_max must be >= 0");
  if (!(0 < t_rep && t_rep < t_hor))
    throw std::invalid_argument("PredictionConfig: need 0 < t_rep < t_hor");
}

bool TrafficLightObstacle::is_red(double t, double lane_coord) const {
  bool affected = false;
  for (int k : lanes)
    if (std::abs(lane_coord - k) < 1.0) { affected = true; break; }
  if (!affected) return false;
  for (const auto& ph : phases) {
    if (period) {
      double r = std::fmod(t - ph.offset, *period);
      if (r < 0) r += *period;
      if (r <= ph.duration) return true;
    } else {
      if (t >= ph.offset && t <= ph.offset + ph.duration) return true;
    }
  }
  return false;
}

namespace {

struct Iv {
  double lo, hi;
};
using IvList = std::vector<Iv>;

bool nonempty(const IvList& ivs) {
  for (const auto& iv : ivs)
    if (iv.hi >= iv.lo) return true;
  return false;
}

IvList intersect(const IvList& a, const IvList& b) {
  IvList out;
  for (const auto& x : a)
    for (const auto& y : b) {
      const double lo = std::max(x.lo, y.lo);
      const double hi = std::min(x.hi, y.hi);
      if (hi >= lo) out.push_back({lo, hi});
    }
  return out;
}

// Sub-intervals of [lo, hi] where q(t) = a*t^2 + b*t + c >= 0 (closed).
IvList quad_nonneg(double a, double b, double c, double lo, double hi) {
  IvList out;
  if (lo > hi) return out;
  const double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
  if (std::abs(a) < 1e-14 * scale) {
    if (std::abs(b) < 1e-14 * scale) {
      if (c >= 0) out.push_back({lo, hi});
      return out;
    }
    const double r = -c / b;
    if (b > 0) {
      if (r <= hi) out.push_back({std::max(lo, r), hi});
    } else {
      if (r >= lo) out.push_back({lo, std::min(hi, r)});
    }
    return out;
  }
  const double disc = b * b - 4.0 * a * c;
  const double disc_tol = 1e-9 * std::max(1.0, b * b + std::abs(4.0 * a * c));
  if (disc <= disc_tol) {
    // No real crossing (or a tangency): sign is that of a away from the
    // vertex; a tangency point itself satisfies >= 0 either way.
    if (a > 0) {
      out.push_back({lo, hi});
    } else if (disc >= -disc_tol) {
      const double r = -b / (2.0 * a);
      if (r >= lo && r <= hi) out.push_back({r, r});
    }
    return out;
  }
  const double sq = std::sqrt(disc);
  double r1 = (-b - sq) / (2.0 * a);
  double r2 = (-b + sq) / (2.0 * a);
  if (r1 > r2) std::swap(r1, r2);
  if (a > 0) {
    if (r1 >= lo) out.push_back({lo, std::min(hi, r1)});
    if (r2 <= hi) out.push_back({std::max(lo, r2), hi});
  } else {
    const double wlo = std::max(lo, r1);
    const double whi = std::min(hi, r2);
    if (whi >= wlo) out.push_back({wlo, whi});
  }
  return out;
}

// Window of [lo, hi] where rate*t + off lies strictly inside (band_lo,
// band_hi). Genuine band crossings are nudged inward so that boundary
// contact does not count as containment.
IvList open_band_window(double rate, double off, double band_lo,
                        double band_hi, double lo, double hi) {
  IvList out;
  if (lo > hi) return out;
  if (rate == 0.0) {
    if (off > band_lo && off < band_hi) out.push_back({lo, hi});
    return out;
  }
  double t1 = (band_lo - off) / rate;
  double t2 = (band_hi - off) / rate;
  if (t1 > t2) std::swap(t1, t2);
  double wlo = t1, whi = t2;
  const double eps_lo = 1e-12 * std::max(1.0, std::abs(wlo));
  const double eps_hi = 1e-12 * std::max(1.0, std::abs(whi));
  wlo += eps_lo;
  whi -= eps_hi;
  wlo = std::max(wlo, lo);
  whi = std::min(whi, hi);
  if (whi >= wlo) out.push_back({wlo, whi});
  return out;
}

void check_prediction_window(const TrajectorySegment& seg,
                             const VehicleObstacle& o,
                             const PredictionConfig& pc) {
  if (seg.t_start < o.t0 - 1e-6)
    throw std::domain_error("vehicle obstacle queried before observation time");
  if (seg.t_end > o.t0 + pc.t_hor + 1e-6)
    throw std::out_of_range("vehicle obstacle queried beyond prediction horizon");
}

// Longitudinal range swept by the segment (for cheap rejects).
std::pair<double, double> segment_s_range(const TrajectorySegment& seg) {
  double mn = std::min(seg.s_start, seg.s_end());
  double mx = std::max(seg.s_start, seg.s_end());
  if (seg.a != 0.0) {
    const double tau_v = -seg.v_start / seg.a;
    if (tau_v > 0 && tau_v < seg.duration()) {
      const double sv = seg.s_at(seg.t_start + tau_v);
      mn = std::min(mn, sv);
      mx = std::max(mx, sv);
    }
  }
  return {mn, mx};
}

}  // namespace

std::pair<double, double> vehicle_bounds(const VehicleObstacle& o,
                                         const RuleConfig& rc,
                                         const PredictionConfig& pc, double t) {
  if (t < o.t0 - 1e-9)
    throw std::domain_error("vehicle_bounds: t before observation time");
  if (t > o.t0 + pc.t_hor + 1e-9)
    throw std::out_of_range("vehicle_bounds: t beyond prediction horizon");
  const double half = 0.5 * (o.length + rc.l_ego);
  const double s_b = (t < o.t0 + pc.t_rep) ? pc.ds_max : 3.0 * pc.ds_max;
  const double center = o.center_at(t);
  return {center - half - s_b, center + half + s_b};
}

bool check_vehicle_collision(const TrajectorySegment& seg,
                             const VehicleObstacle& o, const RuleConfig& rc,
                             const PredictionConfig& pc) {
  const double dur = seg.duration();
  if (dur <= 0.0) return false;
  check_prediction_window(seg, o, pc);

  const IvList lane_win = open_band_window(seg.l_rate(), seg.l_start,
                                           o.lane - 1.0, o.lane + 1.0, 0.0, dur);
  if (lane_win.empty()) return false;

  const double half = 0.5 * (o.length + rc.l_ego);
  const double center0 = o.center_at(seg.t_start);
  // Buffer tier switch at t0 + t_rep, in segment-relative time.
  const double tau_b = (o.t0 + pc.t_rep) - seg.t_start;

  struct Tier {
    double lo, hi, buffer;
  };
  std::vector<Tier> tiers;
  const double eps = 1e-12 * std::max(1.0, std::abs(tau_b));
  if (tau_b > 0.0)
    tiers.push_back({0.0, std::min(tau_b - eps, dur), pc.ds_max});
  if (tau_b < dur)
    tiers.push_back({std::max(tau_b, 0.0), dur, 3.0 * pc.ds_max});

  for (const auto& tier : tiers) {
    if (tier.hi < tier.lo) continue;
    const double ext = half + tier.buffer;
    // s(tau) - lower(tau) >= 0
    IvList above = quad_nonneg(0.5 * seg.a, seg.v_start - o.v0,
                               seg.s_start - (center0 - ext), tier.lo, tier.hi);
    if (above.empty()) continue;
    // upper(tau) - s(tau) >= 0
    IvList below = quad_nonneg(-0.5 * seg.a, o.v0 - seg.v_start,
                               (center0 + ext) - seg.s_start, tier.lo, tier.hi);
    IvList hit = intersect(intersect(above, below), lane_win);
    if (nonempty(hit)) return true;
  }
  return false;
}

bool check_overtaking_rules(const TrajectorySegment& seg,
                            const VehicleObstacle& o, const RuleConfig& rc,
                            const PredictionConfig& pc) {
  if (!rc.no_right_overtake && !rc.enforce_min_overtake_speed) return false;
  const double dur = seg.duration();
  if (dur <= 0.0) return false;
  check_prediction_window(seg, o, pc);

  const double center0 = o.center_at(seg.t_start);
  if (rc.no_right_overtake) {
    // l <= lane - 1 (closed), v >= obstacle v, obstacle center >= ego s.
    IvList lane = quad_nonneg(0.0, -seg.l_rate(), (o.lane - 1.0) - seg.l_start,
                              0.0, dur);
    IvList faster = quad_nonneg(0.0, seg.a, seg.v_start - o.v0, 0.0, dur);
    IvList behind = quad_nonneg(-0.5 * seg.a, o.v0 - seg.v_start,
                                center0 - seg.s_start, 0.0, dur);
    if (nonempty(intersect(intersect(lane, faster), behind))) return true;
  }
  if (rc.enforce_min_overtake_speed) {
    // l >= lane + 1 (closed), v <= obstacle v + dv_ov.
    IvList lane = quad_nonneg(0.0, seg.l_rate(), seg.l_start - (o.lane + 1.0),
                              0.0, dur);
    IvList slow = quad_nonneg(0.0, -seg.a, (o.v0 + rc.dv_ov) - seg.v_start,
                              0.0, dur);
    if (nonempty(intersect(lane, slow))) return true;
  }
  return false;
}

bool check_traffic_light(const TrajectorySegment& seg,
                         const TrafficLightObstacle& tl) {
  const double dur = seg.duration();
  if (dur <= 0.0) return false;

  // Instants (or a stall interval) where s(tau) == stop line.
  IvList at_line;
  const double a2 = 0.5 * seg.a;
  const double c = seg.s_start - tl.s;
  if (a2 == 0.0 && seg.v_start == 0.0) {
    if (std::abs(c) <= 1e-9) at_line.push_back({0.0, dur});
  } else {
    IvList ge = quad_nonneg(a2, seg.v_start, c, 0.0, dur);
    IvList le = quad_nonneg(-a2, -seg.v_start, -c, 0.0, dur);
    at_line = intersect(ge, le);
  }
  if (at_line.empty()) return false;

  for (const auto& cross : at_line) {
    for (int k : tl.lanes) {
      IvList in_lane;
      if (cross.hi - cross.lo <= 1e-12) {
        if (std::abs(seg.l_at(seg.t_start + cross.lo) - k) < 1.0)
          in_lane.push_back(cross);
      } else {
        in_lane = open_band_window(seg.l_rate(), seg.l_start, k - 1.0, k + 1.0,
                                   cross.lo, cross.hi);
      }
      for (const auto& iv : in_lane) {
        const double t1 = seg.t_start + iv.lo;
        const double t2 = seg.t_start + iv.hi;
        for (const auto& ph : tl.phases) {
          if (tl.period) {
            const double p = *tl.period;
            const auto n_lo = static_cast<long long>(std::floor((t1 - ph.offset - ph.duration) / p));
            const auto n_hi = static_cast<long long>(std::ceil((t2 - ph.offset) / p));
            for (long long n = n_lo; n <= n_hi; ++n) {
              const double r1 = ph.offset + static_cast<double>(n) * p;
              if (std::max(t1, r1) <= std::min(t2, r1 + ph.duration)) return true;
            }
          } else {
            if (std::max(t1, ph.offset) <= std::min(t2, ph.offset + ph.duration))
              return true;
          }
        }
      }
    }
  }
  return false;
}

bool check_speed_limit(const TrajectorySegment& seg, const SpeedLimitZone& z) {
  const double dur = seg.duration();
  if (dur <= 0.0) return false;
  const double a2 = 0.5 * seg.a;
  IvList in_zone = intersect(
      quad_nonneg(a2, seg.v_start, seg.s_start - z.s, 0.0, dur),
      quad_nonneg(-a2, -seg.v_start, (z.s + z.length) - seg.s_start, 0.0, dur));
  if (in_zone.empty()) return false;
  IvList speeding = quad_nonneg(0.0, seg.a, seg.v_start - z.v_limit, 0.0, dur);
  return nonempty(intersect(in_zone, speeding));
}

bool check_lane_ban(const TrajectorySegment& seg, const LaneChangeBan& b) {
  const double dur = seg.duration();
  if (dur <= 0.0) return false;
  const double rate = seg.l_rate();
  if (b.direction == BanDirection::left_only && !(rate > 0.0)) return false;
  if (b.direction == BanDirection::right_only && !(rate < 0.0)) return false;

  IvList band = open_band_window(rate, seg.l_start, b.boundary,
                                 b.boundary + 1.0, 0.0, dur);
  if (band.empty()) return false;
  const double a2 = 0.5 * seg.a;
  IvList in_zone = intersect(
      quad_nonneg(a2, seg.v_start, seg.s_start - b.s, 0.0, dur),
      quad_nonneg(-a2, -seg.v_start, (b.s + b.length) - seg.s_start, 0.0, dur));
  return nonempty(intersect(band, in_zone));
}

CollisionReport check_all(const TrajectorySegment& seg, const ObstacleSet& obs,
                          const RuleConfig& rc, const PredictionConfig& pc) {
  const auto [smin, smax] = segment_s_range(seg);
  for (std::size_t i = 0; i < obs.vehicles.size(); ++i) {
    const auto& v = obs.vehicles[i];
    check_prediction_window(seg, v, pc);
    // Cheap reject on the swept longitudinal range before the full check.
    const double ext = 0.5 * (v.length + rc.l_ego) + 3.0 * pc.ds_max;
    const double c1 = v.center_at(seg.t_start);
    const double c2 = v.center_at(seg.t_end);
    const bool disjoint = std::max(c1, c2) + ext < smin - 1e-9 ||
                          std::min(c1, c2) - ext > smax + 1e-9;
    if (!disjoint && check_vehicle_collision(seg, v, rc, pc))
      return {false, "vehicle " + std::to_string(i)};
    if (check_overtaking_rules(seg, v, rc, pc))
      return {false, "vehicle " + std::to_string(i) + " (overtaking rule)"};
  }
  for (std::size_t i = 0; i < obs.lights.size(); ++i) {
    if (obs.lights[i].s < smin - 1e-9 || obs.lights[i].s > smax + 1e-9) continue;
    if (check_traffic_light(seg, obs.lights[i]))
      return {false, "traffic_light " + std::to_string(i)};
  }
  for (std::size_t i = 0; i < obs.limits.size(); ++i) {
    const auto& z = obs.limits[i];
    if (z.s + z.length < smin - 1e-9 || z.s > smax + 1e-9) continue;
    if (check_speed_limit(seg, z))
      return {false, "speed_limit " + std::to_string(i)};
  }
  for (std::size_t i = 0; i < obs.bans.size(); ++i) {
    const auto& b = obs.bans[i];
    if (b.s + b.length < smin - 1e-9 || b.s > smax + 1e-9) continue;
    if (check_lane_ban(seg, b))
      return {false, "lane_ban " + std::to_string(i)};
  }
  return {true, ""};
}

CollisionReport check_all(const Trajectory& traj, const ObstacleSet& obs,
                          const RuleConfig& rc, const PredictionConfig& pc) {
  for (const auto& seg : traj.segments) {
    CollisionReport r = check_all(seg, obs, rc, pc);
    if (!r.pass) return r;
  }
  return {true, ""};
}

}  // namespace stp
