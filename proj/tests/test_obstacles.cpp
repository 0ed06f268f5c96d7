#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stp/obstacles.hpp"

using namespace stp;

namespace {

RuleConfig urban_rules() {
  RuleConfig rc;
  rc.l_ego = 5.0;
  return rc;
}

PredictionConfig pred(double ds_max = 1.0, double t_rep = 1.0, double t_hor = 30.0) {
  PredictionConfig pc;
  pc.ds_max = ds_max;
  pc.t_rep = t_rep;
  pc.t_hor = t_hor;
  return pc;
}

TrajectorySegment hold(double t0, double dur, double s, double v, double lane) {
  return TrajectorySegment{t0, t0 + dur, s, v, v, 0.0, lane, lane};
}

}  // namespace

TEST_CASE("vehicle bounds apply the step safety buffer") {
  VehicleObstacle o{50.0, 10.0, 1.0, 5.0, 0.0};
  const RuleConfig rc = urban_rules();
  const PredictionConfig pc = pred(1.0, 1.0, 30.0);

  auto [lo1, hi1] = vehicle_bounds(o, rc, pc, 0.5);
  CHECK(lo1 == doctest::Approx(49.0));
  CHECK(hi1 == doctest::Approx(61.0));

  auto [lo2, hi2] = vehicle_bounds(o, rc, pc, 2.0);
  CHECK(lo2 == doctest::Approx(62.0));
  CHECK(hi2 == doctest::Approx(78.0));

  const PredictionConfig no_err = pred(0.0, 1.0, 30.0);
  auto [lo3, hi3] = vehicle_bounds(o, rc, no_err, 2.0);
  CHECK(lo3 == doctest::Approx(70.0 - 5.0));
  CHECK(hi3 == doctest::Approx(70.0 + 5.0));

  CHECK_THROWS_AS(vehicle_bounds(o, rc, pc, 31.0), std::out_of_range);
  CHECK_THROWS_AS(vehicle_bounds(o, rc, pc, -1.0), std::domain_error);
}

TEST_CASE("vehicle collision basics") {
  const RuleConfig rc = urban_rules();
  const PredictionConfig pc = pred();
  VehicleObstacle o{55.0, 0.0, 1.0, 5.0, 0.0};

  CHECK(check_vehicle_collision(hold(0.0, 1.0, 55.0, 0.0, 1.0), o, rc, pc));
  // Two lanes away: free regardless of s.
  CHECK_FALSE(check_vehicle_collision(hold(0.0, 1.0, 55.0, 0.0, 3.0), o, rc, pc));
  // Exactly one lane away: boundary contact is free.
  CHECK_FALSE(check_vehicle_collision(hold(0.0, 1.0, 55.0, 0.0, 2.0), o, rc, pc));
  // Degenerate zero-duration segment.
  CHECK_FALSE(check_vehicle_collision(hold(0.0, 0.0, 55.0, 0.0, 1.0), o, rc, pc));
}

TEST_CASE("monotone conservatism in the buffer size") {
  const RuleConfig rc = urban_rules();
  std::mt19937_64 rng(31);
  for (int i = 0; i < 2000; ++i) {
    TrajectorySegment seg = test::random_segment(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    VehicleObstacle o;
    o.s0 = seg.s_start + (u(rng) - 0.3) * 60.0;
    o.v0 = u(rng) * 14.0;
    o.lane = 1 + static_cast<int>(u(rng) * 3);
    o.t0 = std::max(0.0, seg.t_start - u(rng));
    const double small = u(rng) * 2.0;
    const bool hit_small =
        check_vehicle_collision(seg, o, rc, pred(small, 1.0, 60.0));
    const bool hit_big =
        check_vehicle_collision(seg, o, rc, pred(small + 1.0, 1.0, 60.0));
    if (hit_small) CHECK(hit_big);
  }
}

TEST_CASE("closed-form vehicle collision matches dense sampling") {
  const RuleConfig rc = urban_rules();
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    TrajectorySegment seg = test::random_segment(rng);
    VehicleObstacle o;
    o.s0 = seg.s_start + (u(rng) - 0.35) * 80.0;
    o.v0 = u(rng) * 14.0;
    o.lane = 1 + static_cast<int>(u(rng) * 3);
    o.length = 3.5 + u(rng) * 8.0;
    o.t0 = std::max(0.0, seg.t_start - u(rng) * 2.0);
    const PredictionConfig pc = pred(u(rng) * 2.0, 0.5 + u(rng) * 2.0, 60.0);
    const bool closed = check_vehicle_collision(seg, o, rc, pc);
    const auto sampled = test::sample_vehicle_collision(seg, o, rc, pc);
    if (!test::verdicts_agree(closed, sampled)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("overtaking rules") {
  RuleConfig rc = urban_rules();
  const PredictionConfig pc = pred();
  VehicleObstacle o{50.0, 10.0, 2.0, 5.0, 0.0};

  SUBCASE("urban mode short-circuits to false") {
    TrajectorySegment seg = hold(0.0, 2.0, 30.0, 14.0, 1.0);
    CHECK_FALSE(check_overtaking_rules(seg, o, rc, pc));
  }
  SUBCASE("right overtake while behind and faster") {
    rc.no_right_overtake = true;
    // Right of the obstacle (lane 1 vs 2), faster, behind its center.
    CHECK(check_overtaking_rules(hold(0.0, 2.0, 30.0, 14.0, 1.0), o, rc, pc));
    // Ahead of it the clause s_k >= s fails throughout.
    CHECK_FALSE(check_overtaking_rules(hold(0.0, 2.0, 80.0, 14.0, 1.0), o, rc, pc));
    // Same lane never triggers the rule.
    CHECK_FALSE(check_overtaking_rules(hold(0.0, 2.0, 80.0, 14.0, 2.0), o, rc, pc));
  }
  SUBCASE("slow left overtake boundary is inclusive") {
    rc.enforce_min_overtake_speed = true;
    rc.dv_ov = 3.0;
    CHECK(check_overtaking_rules(hold(0.0, 2.0, 45.0, 12.9, 3.0), o, rc, pc));
    CHECK_FALSE(check_overtaking_rules(hold(0.0, 2.0, 45.0, 13.1, 3.0), o, rc, pc));
    CHECK(check_overtaking_rules(hold(0.0, 2.0, 45.0, 13.0, 3.0), o, rc, pc));
  }
  SUBCASE("matches dense sampling") {
    rc.no_right_overtake = true;
    rc.enforce_min_overtake_speed = true;
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int disagreements = 0;
    for (int i = 0; i < 4000; ++i) {
      TrajectorySegment seg = test::random_segment(rng);
      VehicleObstacle ov;
      ov.s0 = seg.s_start + (u(rng) - 0.4) * 60.0;
      ov.v0 = u(rng) * 14.0;
      ov.lane = 2;
      ov.t0 = std::max(0.0, seg.t_start - u(rng));
      const bool closed = check_overtaking_rules(seg, ov, rc, pred(1.0, 1.0, 60.0));
      const auto sampled = test::sample_overtaking(seg, ov, rc);
      if (!test::verdicts_agree(closed, sampled)) ++disagreements;
    }
    CHECK(disagreements == 0);
  }
}

TEST_CASE("traffic light crossings") {
  TrafficLightObstacle tl;
  tl.s = 100.0;
  tl.lanes = {1};
  tl.period = 90.0;
  tl.phases = {{30.0, 30.0}};

  auto crossing_at = [&](double t_cross) {
    // Constant 10 m/s, crossing s=100 at t_cross.
    return TrajectorySegment{t_cross - 2.0, t_cross + 2.0, 100.0 - 20.0,
                             10.0,          10.0,          0.0,
                             1.0,           1.0};
  };
  CHECK(check_traffic_light(crossing_at(45.0), tl));
  CHECK_FALSE(check_traffic_light(crossing_at(20.0), tl));
  CHECK(check_traffic_light(crossing_at(120.0), tl));  // periodic unroll

  // Stopped before the line: never crosses.
  CHECK_FALSE(check_traffic_light(hold(40.0, 10.0, 95.0, 0.0, 1.0), tl));
  // Crossing during red in the next lane over is unaffected.
  CHECK_FALSE(check_traffic_light(
      TrajectorySegment{43.0, 47.0, 80.0, 10.0, 10.0, 0.0, 2.0, 2.0}, tl));
  // Aperiodic list.
  TrafficLightObstacle once = tl;
  once.period.reset();
  CHECK(check_traffic_light(crossing_at(45.0), once));
  CHECK_FALSE(check_traffic_light(crossing_at(120.0), once));
}

TEST_CASE("traffic light periodicity property") {
  TrafficLightObstacle tl;
  tl.s = 60.0;
  tl.lanes = {1, 2};
  tl.period = 75.0;
  tl.phases = {{10.0, 20.0}, {50.0, 5.0}};
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double t_cross = u(rng) * 150.0 + 2.0;
    const double v = 5.0 + u(rng) * 9.0;
    TrajectorySegment seg{t_cross - 1.0, t_cross + 1.0, 60.0 - v, v, v, 0.0, 1.0, 1.0};
    TrajectorySegment shifted = seg;
    shifted.t_start += *tl.period;
    shifted.t_end += *tl.period;
    CHECK(check_traffic_light(seg, tl) == check_traffic_light(shifted, tl));
  }
}

TEST_CASE("speed limit zone") {
  SpeedLimitZone z{100.0, 50.0, 13.89};

  CHECK(check_speed_limit(TrajectorySegment{0, 5, 90, 15, 15, 0, 1, 1}, z));
  CHECK_FALSE(check_speed_limit(TrajectorySegment{0, 5, 200, 15, 15, 0, 1, 1}, z));
  // Decelerating segment entering the zone at exactly the limit: inclusive.
  const double v0 = 15.0, a = -1.0;
  // v(t) = 15 - t hits 13.89 at t = 1.11; choose s so s(1.11) = 100.
  const double t_hit = (v0 - z.v_limit) / -a;
  const double s0 = 100.0 - (v0 * t_hit + 0.5 * a * t_hit * t_hit);
  CHECK(check_speed_limit(TrajectorySegment{0, 5, s0, v0, v0 + a * 5, a, 1, 1}, z));

  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int disagreements = 0;
  for (int i = 0; i < 6000; ++i) {
    TrajectorySegment seg = test::random_segment(rng);
    SpeedLimitZone zone{seg.s_start + (u(rng) - 0.3) * 50.0, 5.0 + u(rng) * 60.0,
                        3.0 + u(rng) * 12.0};
    const bool closed = check_speed_limit(seg, zone);
    const auto sampled = test::sample_speed_limit(seg, zone);
    if (!test::verdicts_agree(closed, sampled)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("lane change ban") {
  LaneChangeBan ban{50.0, 100.0, 1, BanDirection::left_only};

  // Lane keeping at an integer lane never enters the open band.
  CHECK_FALSE(check_lane_ban(hold(0.0, 3.0, 60.0, 10.0, 1.0), ban));
  // Leftward change crossing the boundary inside the zone.
  TrajectorySegment left{0.0, 4.0, 60.0, 10.0, 10.0, 0.0, 1.0, 2.0};
  CHECK(check_lane_ban(left, ban));
  // Rightward change is allowed under left_only.
  TrajectorySegment right{0.0, 4.0, 60.0, 10.0, 10.0, 0.0, 2.0, 1.0};
  CHECK_FALSE(check_lane_ban(right, ban));
  ban.direction = BanDirection::right_only;
  CHECK(check_lane_ban(right, ban));
  CHECK_FALSE(check_lane_ban(left, ban));
  ban.direction = BanDirection::both;
  CHECK(check_lane_ban(right, ban));
  CHECK(check_lane_ban(left, ban));
  // Outside the zone in s.
  TrajectorySegment far = left;
  far.s_start = 300.0;
  CHECK_FALSE(check_lane_ban(far, ban));

  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int disagreements = 0;
  for (int i = 0; i < 6000; ++i) {
    TrajectorySegment seg = test::random_segment(rng);
    LaneChangeBan b;
    b.s = seg.s_start + (u(rng) - 0.3) * 50.0;
    b.length = 5.0 + u(rng) * 60.0;
    b.boundary = 1 + static_cast<int>(u(rng) * 2);
    b.direction = static_cast<BanDirection>(static_cast<int>(u(rng) * 3));
    const bool closed = check_lane_ban(seg, b);
    const auto sampled = test::sample_lane_ban(seg, b);
    if (!test::verdicts_agree(closed, sampled)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("check_all aggregates and names the first violator") {
  const RuleConfig rc = urban_rules();
  const PredictionConfig pc = pred();
  ObstacleSet obs;
  CHECK(check_all(hold(0.0, 2.0, 10.0, 10.0, 1.0), obs, rc, pc).pass);

  obs.vehicles.push_back({30.0, 0.0, 1.0, 5.0, 0.0});
  const CollisionReport rep = check_all(hold(0.0, 2.0, 28.0, 0.0, 1.0), obs, rc, pc);
  CHECK_FALSE(rep.pass);
  CHECK(rep.violator == "vehicle 0");

  obs.limits.push_back({0.0, 400.0, 8.0});
  const CollisionReport rep2 = check_all(hold(0.0, 2.0, 200.0, 10.0, 1.0), obs, rc, pc);
  CHECK_FALSE(rep2.pass);
  CHECK(rep2.violator == "speed_limit 0");
}

TEST_CASE("check_all agrees with the dense oracle on random scenes") {
  const RuleConfig rc = urban_rules();
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int disagreements = 0;
  for (int i = 0; i < 1000; ++i) {
    TrajectorySegment seg = test::random_segment(rng);
    const PredictionConfig pc = pred(u(rng), 1.0, 60.0);
    ObstacleSet obs;
    for (int n = 0; n < 3; ++n) {
      VehicleObstacle o;
      o.s0 = seg.s_start + (u(rng) - 0.35) * 70.0;
      o.v0 = u(rng) * 14.0;
      o.lane = 1 + static_cast<int>(u(rng) * 3);
      o.t0 = std::max(0.0, seg.t_start - u(rng));
      obs.vehicles.push_back(o);
    }
    TrafficLightObstacle tl;
    tl.s = seg.s_start + u(rng) * 30.0;
    tl.lanes = {1, 2, 3};
    tl.period = 60.0;
    tl.phases = {{u(rng) * 30.0, 10.0 + u(rng) * 20.0}};
    obs.lights.push_back(tl);
    obs.limits.push_back({seg.s_start + (u(rng) - 0.3) * 40.0, 30.0, 4.0 + u(rng) * 10.0});
    obs.bans.push_back({seg.s_start - 10.0, 60.0, 1 + static_cast<int>(u(rng) * 2),
                        BanDirection::both});

    const bool closed = !check_all(seg, obs, rc, pc).pass;
    bool sampled = false;
    double worst = -1e18;
    for (const auto& o : obs.vehicles) {
      const auto sv = test::sample_vehicle_collision(seg, o, rc, pc);
      sampled = sampled || sv.hit;
      worst = std::max(worst, sv.slack);
    }
    {
      const auto sv = test::sample_traffic_light(seg, tl);
      sampled = sampled || sv.hit;
      worst = std::max(worst, sv.slack);
    }
    {
      const auto sv = test::sample_speed_limit(seg, obs.limits[0]);
      sampled = sampled || sv.hit;
      worst = std::max(worst, sv.slack);
    }
    {
      const auto sv = test::sample_lane_ban(seg, obs.bans[0]);
      sampled = sampled || sv.hit;
      worst = std::max(worst, sv.slack);
    }
    if (closed != sampled && std::abs(worst) > test::kTangencyBand) ++disagreements;
  }
  CHECK(disagreements == 0);
}
