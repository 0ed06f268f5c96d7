#include <doctest.h>

#include <random>

#include "scenarios.hpp"
#include "stp/replan.hpp"

using namespace stp;

namespace {

ReplanConfig replan_config(const test::MiniWorld& w) {
  ReplanConfig rc;
  rc.t_rep = 1.0;
  rc.t_plan = 1.0;
  rc.pc = w.pc;
  return rc;
}

}  // namespace

TEST_CASE("predict builds linearized obstacles and passes statics through") {
  ObstacleSet statics;
  statics.lights.push_back({100.0, {1}, {{0.0, 10.0}}, 60.0});
  statics.limits.push_back({50.0, 20.0, 8.0});
  statics.bans.push_back({0.0, 30.0, 1, BanDirection::both});

  std::vector<VehicleObservation> obs{{100.0, 12.0, 2.0, 4.5}};
  const ObstacleSet out = predict(obs, 3.0, statics);
  REQUIRE(out.vehicles.size() == 1);
  CHECK(out.vehicles[0].t0 == 3.0);
  CHECK(out.vehicles[0].center_at(5.0) == doctest::Approx(100.0 + 12.0 * 2.0));
  CHECK(out.lights.size() == 1);
  CHECK(out.limits.size() == 1);
  CHECK(out.bans.size() == 1);

  const ObstacleSet none = predict({}, 0.0, statics);
  CHECK(none.vehicles.empty());
  CHECK(none.lights.size() == 1);
}

TEST_CASE("bootstrap cycle plans from the measured state") {
  test::MiniWorld w = test::empty_corridor();
  const CostToGoMap map = w.build_map();
  const Heuristic h = w.heuristic(HeuristicKind::dp, &map);
  const ReplanConfig rcfg = replan_config(w);

  const ReplanOutcome oc = replan_step(0.0, nullptr, w.start, w.obs, h, rcfg,
                                       w.cfg, w.gs, w.vp, w.rules, w.profile);
  CHECK_FALSE(oc.fallback);
  CHECK(oc.anchor_t == 0.0);
  CHECK(oc.trajectory.start_time() == doctest::Approx(0.0));
  CHECK_FALSE(oc.trajectory.empty());
}

TEST_CASE("successive cycles anchor at t0 + t_plan and stay consistent") {
  test::MiniWorld w = test::empty_corridor();
  const CostToGoMap map = w.build_map();
  const Heuristic h = w.heuristic(HeuristicKind::dp, &map);
  const ReplanConfig rcfg = replan_config(w);

  ReplanOutcome first = replan_step(0.0, nullptr, w.start, w.obs, h, rcfg,
                                    w.cfg, w.gs, w.vp, w.rules, w.profile);
  Trajectory current = first.trajectory;
  for (int cycle = 1; cycle <= 4; ++cycle) {
    const double t0 = cycle * rcfg.t_rep;
    const ReplanOutcome oc =
        replan_step(t0, &current, w.start, w.obs, h, rcfg, w.cfg, w.gs, w.vp,
                    w.rules, w.profile);
    CHECK_FALSE(oc.fallback);
    CHECK(oc.anchor_t == doctest::Approx(t0 + rcfg.t_plan));
    // The new plan starts exactly at the state the old plan predicts there,
    // up to the grid rounding of the start velocity.
    const TrajectoryState prev_state = current.state_at(oc.anchor_t);
    const TrajectoryState new_state = oc.trajectory.state_at(oc.anchor_t);
    CHECK(new_state.s == doctest::Approx(prev_state.s).epsilon(1e-9));
    CHECK(std::abs(new_state.v - prev_state.v) <= 0.5 * w.gs.dv + 1e-9);
    CHECK(new_state.l == doctest::Approx(prev_state.l).epsilon(1e-9));
    current = stitch(current, oc.trajectory, oc.anchor_t, w.gs);
    current.validate();
  }
}

TEST_CASE("steady cruise replans agree on the overlap window") {
  test::MiniWorld w = test::empty_corridor();
  // Pin the speed with a pusher so the optimal plan is the steady cruise.
  w.obs.vehicles.push_back({-13.0, 10.0, 1.0, 5.0, 0.0});
  const CostToGoMap map = w.build_map();
  const Heuristic h = w.heuristic(HeuristicKind::dp, &map);
  ReplanConfig rcfg = replan_config(w);

  ReplanOutcome first = replan_step(0.0, nullptr, w.start, w.obs, h, rcfg,
                                    w.cfg, w.gs, w.vp, w.rules, w.profile);
  Trajectory current = first.trajectory;
  for (int cycle = 1; cycle <= 3; ++cycle) {
    const double t0 = cycle * rcfg.t_rep;
    // Re-observe the pusher where it actually is.
    ObstacleSet obs = w.obs;
    obs.vehicles[0].s0 += 10.0 * t0;
    obs.vehicles[0].t0 = t0;
    const ReplanOutcome oc = replan_step(t0, &current, w.start, obs, h, rcfg,
                                         w.cfg, w.gs, w.vp, w.rules, w.profile);
    const double t_probe = t0 + rcfg.t_plan + 2.0;
    const TrajectoryState a = current.state_at(t_probe);
    const TrajectoryState b = oc.trajectory.state_at(t_probe);
    CHECK(std::abs(a.s - b.s) <= w.gs.ds_grid);
    CHECK(std::abs(a.v - b.v) <= w.gs.dv);
    current = stitch(current, oc.trajectory, oc.anchor_t, w.gs);
  }
}

TEST_CASE("stitch validates continuity and truncates correctly") {
  test::MiniWorld w = test::empty_corridor();
  const CostToGoMap map = w.build_map();
  const Heuristic h = w.heuristic(HeuristicKind::dp, &map);
  const ReplanConfig rcfg = replan_config(w);

  const ReplanOutcome first = replan_step(0.0, nullptr, w.start, w.obs, h,
                                          rcfg, w.cfg, w.gs, w.vp, w.rules,
                                          w.profile);
  const Trajectory base = first.trajectory;

  SUBCASE("identical plans stitch to a no-op") {
    const Trajectory same = stitch(base, base, base.start_time(), w.gs);
    CHECK(same.segments.size() == base.segments.size());
    const TrajectoryState a = base.state_at(3.0);
    const TrajectoryState b = same.state_at(3.0);
    CHECK(a.s == doctest::Approx(b.s));
  }
  SUBCASE("joint continuity at the switch point") {
    const double t_switch = 2.0;
    const TrajectoryState st = base.state_at(t_switch);
    PlanStart mid{t_switch, st.s, st.l, st.v, LaneDir::none};
    const PlanResult res2 = plan(mid, w.obs, h, w.cfg, w.gs, w.vp, w.rules,
                                 w.pc, w.profile);
    const Trajectory joined = stitch(base, res2.trajectory, t_switch, w.gs);
    joined.validate();
    CHECK(joined.state_at(t_switch - 1e-6).s ==
          doctest::Approx(joined.state_at(t_switch + 1e-6).s).epsilon(1e-6));
  }
  SUBCASE("deliberate mismatch raises") {
    Trajectory shifted = base;
    for (auto& seg : shifted.segments) {
      seg.s_start += 20.0;
      seg.t_start += 2.0;
      seg.t_end += 2.0;
    }
    CHECK_THROWS_AS(stitch(base, shifted, 2.0, w.gs), std::runtime_error);
  }
}

TEST_CASE("planning failure falls back to a flagged stop profile") {
  test::MiniWorld w = test::blocked_corridor(1);
  // Ram the ego from behind as well so no feasible edge exists at the anchor.
  w.obs.vehicles.push_back({-11.0, 14.0, 1.0, 5.0, 0.0});
  w.start.v = 0.0;
  w.obs.vehicles[0].s0 = 12.0;  // blocker directly ahead

  const CostToGoMap map = w.build_map();
  const Heuristic h = w.heuristic(HeuristicKind::dp, &map);
  const ReplanConfig rcfg = replan_config(w);
  const ReplanOutcome oc = replan_step(0.0, nullptr, w.start, w.obs, h, rcfg,
                                       w.cfg, w.gs, w.vp, w.rules, w.profile);
  CHECK(oc.fallback);
  CHECK_FALSE(oc.trajectory.empty());
  CHECK(oc.trajectory.segments.back().v_end == 0.0);
  CHECK(oc.trajectory.end_time() >= rcfg.t_rep + rcfg.t_plan);
}

TEST_CASE("short previous plan degrades from its end state") {
  test::MiniWorld w = test::empty_corridor();
  const CostToGoMap map = w.build_map();
  const Heuristic h = w.heuristic(HeuristicKind::dp, &map);
  const ReplanConfig rcfg = replan_config(w);

  Trajectory stub;
  stub.segments.push_back({0.0, 0.5, 0.0, 10.0, 10.0, 0.0, 1.0, 1.0});
  const ReplanOutcome oc = replan_step(0.0, &stub, w.start, w.obs, h, rcfg,
                                       w.cfg, w.gs, w.vp, w.rules, w.profile);
  CHECK(oc.fallback);
  CHECK(oc.anchor_t == doctest::Approx(0.5));
  CHECK(oc.trajectory.segments.back().v_end == 0.0);
}
