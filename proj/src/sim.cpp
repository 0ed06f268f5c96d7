#include "stp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace stp {

using json = nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& why) {
  throw std::runtime_error("scenario: field '" + field + "' " + why);
}

const json& need(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) schema_error(ctx.empty() ? key : ctx + "." + key, "is missing");
  return j.at(key);
}

double num(const json& j, const char* key, const std::string& ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_number()) schema_error(ctx + "." + key, "must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<double>();
}

double stat_mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stat_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = stat_mean(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

void Scenario::validate() const {
  grid.validate();
  vehicle.validate();
  planner.validate();
  replan.validate(planner.t_hor);
  profile.validate();
  if (road_length <= 0) schema_error("road.length", "must be > 0");
  if (n_lanes < 1) schema_error("road.lanes", "must be >= 1");
  if (grid.n_lanes != n_lanes) schema_error("grid.n_lanes", "must match road.lanes");
  if (profile.samples.empty() || profile.samples.front().s != 0.0)
    schema_error("road profile", "must start at s = 0");
  const double goal_rows = goal_s / grid.ds_grid;
  if (std::abs(goal_rows - std::round(goal_rows)) > 1e-9)
    schema_error("goal_s", "must be a multiple of ds_grid");
  if (goal_s < road_length) schema_error("goal_s", "must be >= road.length");

  for (std::size_t i = 0; i < lights.size(); ++i) {
    const auto& tl = lights[i];
    const std::string ctx = "lights[" + std::to_string(i) + "]";
    if (tl.s < 0 || tl.s > road_length) schema_error(ctx + ".s", "outside the road");
    if (tl.phases.empty()) schema_error(ctx + ".phases", "must not be empty");
    for (const auto& ph : tl.phases)
      if (ph.duration <= 0) schema_error(ctx + ".phases.duration", "must be > 0");
    if (tl.period) {
      std::vector<TrafficLightObstacle::Phase> sorted = tl.phases;
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.offset < b.offset; });
      for (std::size_t p = 0; p < sorted.size(); ++p) {
        if (sorted[p].offset < 0 || sorted[p].offset + sorted[p].duration > *tl.period)
          schema_error(ctx + ".phases", "red interval must fit inside the period");
        if (p > 0 && sorted[p].offset < sorted[p - 1].offset + sorted[p - 1].duration)
          schema_error(ctx + ".phases", "red intervals overlap within one period");
      }
    }
    for (int lane : tl.lanes)
      if (lane < 1 || lane > n_lanes) schema_error(ctx + ".lanes", "lane out of range");
  }
  for (std::size_t i = 0; i < limits.size(); ++i) {
    const auto& z = limits[i];
    const std::string ctx = "speed_limits[" + std::to_string(i) + "]";
    if (z.length <= 0) schema_error(ctx + ".length", "must be > 0");
    if (z.v_limit <= 0) schema_error(ctx + ".v_limit", "must be > 0");
    if (z.s < 0 || z.s > road_length) schema_error(ctx + ".s", "outside the road");
  }
  for (std::size_t i = 0; i < bans.size(); ++i) {
    const auto& b = bans[i];
    const std::string ctx = "lane_change_bans[" + std::to_string(i) + "]";
    if (b.length <= 0) schema_error(ctx + ".length", "must be > 0");
    if (b.boundary < 1 || b.boundary >= n_lanes)
      schema_error(ctx + ".boundary", "must name a boundary between existing lanes");
    if (b.s < 0 || b.s > road_length) schema_error(ctx + ".s", "outside the road");
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& a = agents[i];
    const std::string ctx = "agents[" + std::to_string(i) + "]";
    if (a.lane < 1 || a.lane > n_lanes) schema_error(ctx + ".lane", "out of range");
    if (a.s < 0 || a.s > road_length) schema_error(ctx + ".s", "outside the road");
    if (a.v < 0) schema_error(ctx + ".v", "must be >= 0");
    if (a.length <= 0) schema_error(ctx + ".length", "must be > 0");
    for (std::size_t jx = i + 1; jx < agents.size(); ++jx) {
      const auto& b = agents[jx];
      if (a.lane == b.lane &&
          std::abs(a.s - b.s) < 0.5 * (a.length + b.length))
        schema_error("agents", "agents " + std::to_string(i) + " and " +
                                   std::to_string(jx) + " overlap initially");
    }
    if (a.lane == ego.lane &&
        std::abs(a.s - ego.s0) < 0.5 * (a.length + rules.l_ego))
      schema_error(ctx, "overlaps the ego start position");
  }
  if (ego.lane < 1 || ego.lane > n_lanes) schema_error("ego.lane", "out of range");
  if (ego.s0 < 0 || ego.s0 > road_length) schema_error("ego.s", "outside the road");
  if (ego.v0 < 0 || ego.v0 > grid.v_max) schema_error("ego.v", "outside [0, v_max]");
}

namespace {

RoadProfile build_profile(double road_length, double goal_s, double base_limit,
                          const std::vector<std::pair<double, double>>& slopes,
                          const std::vector<SpeedLimitZone>& zones) {
  // Breakpoints wherever slope or the active limit can change.
  std::vector<double> points{0.0};
  for (const auto& sl : slopes) points.push_back(sl.first);
  for (const auto& z : zones) {
    points.push_back(z.s);
    points.push_back(z.s + z.length);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               points.end());

  auto slope_at = [&](double s) {
    double val = 0.0;
    for (const auto& sl : slopes)
      if (sl.first <= s + 1e-12) val = sl.second;
    return val;
  };
  auto limit_at = [&](double s) {
    double lim = base_limit;
    for (const auto& z : zones)
      if (s >= z.s - 1e-12 && s < z.s + z.length - 1e-12)
        lim = std::min(lim, z.v_limit);
    return lim;
  };

  RoadProfile profile;
  for (double s : points) {
    if (s < 0 || s > std::max(road_length, goal_s)) continue;
    profile.samples.push_back({s, slope_at(s), limit_at(s)});
  }
  return profile;
}

Scenario scenario_from_json(const json& j) {
  Scenario sc;
  sc.name = j.value("name", "unnamed");

  const json& road = need(j, "road", "");
  sc.road_length = num(road, "length", "road");
  sc.n_lanes = static_cast<int>(num(road, "lanes", "road"));
  const double base_limit = num_or(road, "speed_limit", 15.0);

  std::vector<std::pair<double, double>> slopes;
  if (road.contains("slope")) {
    for (const auto& pair : road.at("slope"))
      slopes.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  }

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    sc.grid.dv = num_or(g, "dv", sc.grid.dv);
    sc.grid.ds_grid = num_or(g, "ds_grid", sc.grid.ds_grid);
    sc.grid.dt_grid = num_or(g, "dt_grid", sc.grid.dt_grid);
    sc.grid.ds_exp = num_or(g, "ds_exp", sc.grid.ds_exp);
    sc.grid.dt_exp = num_or(g, "dt_exp", sc.grid.dt_exp);
    sc.grid.v_max = num_or(g, "v_max", sc.grid.v_max);
  }
  sc.grid.n_lanes = sc.n_lanes;

  if (j.contains("vehicle")) {
    const json& v = j.at("vehicle");
    auto& vp = sc.vehicle;
    vp.m = num_or(v, "m", vp.m);
    vp.c_rr = num_or(v, "c_rr", vp.c_rr);
    vp.c_dA = num_or(v, "c_dA", vp.c_dA);
    vp.rho = num_or(v, "rho", vp.rho);
    vp.eta_drive = num_or(v, "eta_drive", vp.eta_drive);
    vp.eta_regen = num_or(v, "eta_regen", vp.eta_regen);
    vp.a_min = num_or(v, "a_min", vp.a_min);
    vp.a_max = num_or(v, "a_max", vp.a_max);
    vp.t_lc = num_or(v, "t_lc", vp.t_lc);
    vp.c_lc = num_or(v, "c_lc", vp.c_lc);
  }

  if (j.contains("planner")) {
    const json& p = j.at("planner");
    sc.planner.s_hor = num_or(p, "s_hor", sc.planner.s_hor);
    sc.planner.t_hor = num_or(p, "t_hor", sc.planner.t_hor);
    sc.planner.timeout = num_or(p, "timeout", sc.planner.timeout);
  }

  if (j.contains("replan")) {
    const json& r = j.at("replan");
    sc.replan.t_rep = num_or(r, "t_rep", sc.replan.t_rep);
    sc.replan.t_plan = num_or(r, "t_plan", sc.replan.t_plan);
    sc.replan.pc.ds_max = num_or(r, "ds_max", sc.replan.pc.ds_max);
    sc.replan.pc.t_hor = num_or(r, "prediction_t_hor", 0.0);
  }
  sc.replan.pc.t_rep = sc.replan.t_rep;
  if (sc.replan.pc.t_hor <= 0.0)
    sc.replan.pc.t_hor = sc.replan.t_plan + sc.planner.t_hor + sc.grid.dt_exp + 1.0;

  if (j.contains("rules")) {
    const json& r = j.at("rules");
    sc.rules.l_ego = num_or(r, "l_ego", sc.rules.l_ego);
    sc.rules.dv_ov = num_or(r, "dv_ov", sc.rules.dv_ov);
    sc.rules.no_right_overtake = r.value("no_right_overtake", false);
    sc.rules.enforce_min_overtake_speed = r.value("enforce_min_overtake_speed", false);
  }

  for (std::size_t i = 0; j.contains("lights") && i < j.at("lights").size(); ++i) {
    const json& L = j.at("lights").at(i);
    const std::string ctx = "lights[" + std::to_string(i) + "]";
    TrafficLightObstacle tl;
    tl.s = num(L, "s", ctx);
    if (L.contains("lanes")) {
      for (const auto& lane : L.at("lanes")) tl.lanes.push_back(lane.get<int>());
    } else {
      for (int lane = 1; lane <= sc.n_lanes; ++lane) tl.lanes.push_back(lane);
    }
    if (L.contains("period")) tl.period = L.at("period").get<double>();
    for (const auto& ph : need(L, "phases", ctx))
      tl.phases.push_back({num(ph, "offset", ctx + ".phases"),
                           num(ph, "duration", ctx + ".phases")});
    sc.lights.push_back(std::move(tl));
  }

  for (std::size_t i = 0; j.contains("speed_limits") && i < j.at("speed_limits").size(); ++i) {
    const json& z = j.at("speed_limits").at(i);
    const std::string ctx = "speed_limits[" + std::to_string(i) + "]";
    sc.limits.push_back(
        {num(z, "s", ctx), num(z, "length", ctx), num(z, "v_limit", ctx)});
  }

  for (std::size_t i = 0;
       j.contains("lane_change_bans") && i < j.at("lane_change_bans").size(); ++i) {
    const json& b = j.at("lane_change_bans").at(i);
    const std::string ctx = "lane_change_bans[" + std::to_string(i) + "]";
    LaneChangeBan ban;
    ban.s = num(b, "s", ctx);
    ban.length = num(b, "length", ctx);
    ban.boundary = static_cast<int>(num(b, "boundary", ctx));
    const std::string dir = b.value("direction", "both");
    if (dir == "both") ban.direction = BanDirection::both;
    else if (dir == "left_only") ban.direction = BanDirection::left_only;
    else if (dir == "right_only") ban.direction = BanDirection::right_only;
    else schema_error(ctx + ".direction", "must be both|left_only|right_only");
    sc.bans.push_back(ban);
  }

  const json& ego = need(j, "ego", "");
  sc.ego.s0 = num(ego, "s", "ego");
  sc.ego.v0 = num(ego, "v", "ego");
  sc.ego.lane = static_cast<int>(num(ego, "lane", "ego"));

  auto parse_agent = [&](const json& a, const std::string& ctx) {
    AgentState st;
    st.s = num(a, "s", ctx);
    st.v = num(a, "v", ctx);
    st.lane = static_cast<int>(num(a, "lane", ctx));
    st.length = num_or(a, "length", st.length);
    st.params.desired_speed = num_or(a, "desired_speed", st.params.desired_speed);
    st.params.headway = num_or(a, "headway", st.params.headway);
    st.params.accel = num_or(a, "accel", st.params.accel);
    st.params.comfort_decel = num_or(a, "comfort_decel", st.params.comfort_decel);
    st.params.min_gap = num_or(a, "min_gap", st.params.min_gap);
    return st;
  };
  if (j.contains("agents")) {
    for (std::size_t i = 0; i < j.at("agents").size(); ++i)
      sc.agents.push_back(parse_agent(j.at("agents").at(i),
                                      "agents[" + std::to_string(i) + "]"));
  }
  if (j.contains("traffic")) {
    // Compact generator: evenly spaced agents per lane at the given density.
    const json& tr = j.at("traffic");
    const double density = num(tr, "density_per_km_lane", "traffic");
    const double speed = num_or(tr, "speed", 12.0);
    const double from = num_or(tr, "from", 20.0);
    const double to = num_or(tr, "to", sc.road_length - 10.0);
    const double clearance = num_or(tr, "ego_clearance", 30.0);
    const double spacing = 1000.0 / density;
    for (int lane = 1; lane <= sc.n_lanes; ++lane) {
      for (double s = from; s <= to + 1e-9; s += spacing) {
        if (lane == sc.ego.lane && std::abs(s - sc.ego.s0) < clearance) continue;
        AgentState st;
        st.s = s;
        st.v = speed;
        st.lane = lane;
        st.params.desired_speed = num_or(tr, "desired_speed", speed);
        sc.agents.push_back(st);
      }
    }
  }

  sc.goal_s = num_or(j, "goal_s", 0.0);
  if (sc.goal_s <= 0.0)
    sc.goal_s = std::ceil(sc.road_length / sc.grid.ds_grid - 1e-9) * sc.grid.ds_grid;
  sc.seed = j.value("seed", 1);

  sc.profile = build_profile(sc.road_length, sc.goal_s, base_limit, slopes, sc.limits);
  sc.validate();
  return sc;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  return scenario_from_json(json::parse(text));
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("scenario: " + path + " is not valid JSON: " + e.what());
  }
  return scenario_from_json(j);
}

void step_agents(std::vector<AgentState>& agents,
                 const std::vector<TrafficLightObstacle>& lights, double dt,
                 double t_now, const TrajectoryState* ego, double ego_length) {
  if (dt <= 0) throw std::domain_error("step_agents: dt must be > 0");
  std::vector<double> acc(agents.size(), 0.0);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentState& a = agents[i];
    double gap = std::numeric_limits<double>::infinity();
    double lead_v = 0.0;
    for (std::size_t jx = 0; jx < agents.size(); ++jx) {
      if (jx == i || agents[jx].lane != a.lane || agents[jx].s <= a.s) continue;
      const double g = agents[jx].s - a.s - 0.5 * (a.length + agents[jx].length);
      if (g < gap) {
        gap = g;
        lead_v = agents[jx].v;
      }
    }
    if (ego && std::abs(ego->l - a.lane) < 1.0 && ego->s > a.s) {
      const double g = ego->s - a.s - 0.5 * (a.length + ego_length);
      if (g < gap) {
        gap = g;
        lead_v = ego->v;
      }
    }
    for (const auto& tl : lights) {
      const double g = tl.s - a.s - 0.5 * a.length;
      if (g <= 0) continue;  // stop line already passed
      if (!tl.is_red(t_now, a.lane)) continue;
      if (g < gap) {
        gap = g;
        lead_v = 0.0;
      }
    }
    const AgentParams& p = a.params;
    double x = p.accel * (1.0 - std::pow(a.v / p.desired_speed, 4));
    if (std::isfinite(gap)) {
      const double g = std::max(gap, 0.1);
      const double s_star =
          p.min_gap + std::max(0.0, a.v * p.headway +
                                        a.v * (a.v - lead_v) /
                                            (2.0 * std::sqrt(p.accel * p.comfort_decel)));
      x -= p.accel * (s_star / g) * (s_star / g);
    }
    acc[i] = std::max(x, -8.0);
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    agents[i].v = std::max(0.0, agents[i].v + acc[i] * dt);
    agents[i].s += agents[i].v * dt;
  }
}

double SimLog::mean_nodes() const {
  std::vector<double> xs;
  for (const auto& c : cycles) xs.push_back(static_cast<double>(c.nodes_expanded));
  return stat_mean(xs);
}
double SimLog::stddev_nodes() const {
  std::vector<double> xs;
  for (const auto& c : cycles) xs.push_back(static_cast<double>(c.nodes_expanded));
  return stat_stddev(xs);
}
double SimLog::mean_plan_seconds() const {
  std::vector<double> xs;
  for (const auto& c : cycles) xs.push_back(c.wall_seconds);
  return stat_mean(xs);
}
double SimLog::stddev_plan_seconds() const {
  std::vector<double> xs;
  for (const auto& c : cycles) xs.push_back(c.wall_seconds);
  return stat_stddev(xs);
}

namespace {

void perturb_agents(Scenario& sc, std::uint64_t seed, double sigma_s,
                    double sigma_v) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> ds(0.0, sigma_s > 0 ? sigma_s : 1e-12);
  std::normal_distribution<double> dv(0.0, sigma_v > 0 ? sigma_v : 1e-12);
  for (auto& a : sc.agents) {
    if (sigma_s > 0) a.s = std::clamp(a.s + ds(rng), 1.0, sc.road_length - 1.0);
    if (sigma_v > 0) a.v = std::max(0.0, a.v + dv(rng));
  }
  // Restore feasibility deterministically: keep agents clear of the ego
  // start, then enforce per-lane spacing front to back.
  for (auto& a : sc.agents) {
    if (a.lane != sc.ego.lane) continue;
    const double clear = 0.5 * (a.length + sc.rules.l_ego) + 2.0;
    if (std::abs(a.s - sc.ego.s0) < clear)
      a.s = sc.ego.s0 + (a.s >= sc.ego.s0 ? clear : -clear);
  }
  for (int lane = 1; lane <= sc.n_lanes; ++lane) {
    std::vector<AgentState*> in_lane;
    for (auto& a : sc.agents)
      if (a.lane == lane) in_lane.push_back(&a);
    std::sort(in_lane.begin(), in_lane.end(),
              [](const AgentState* x, const AgentState* y) { return x->s < y->s; });
    for (std::size_t i = 1; i < in_lane.size(); ++i) {
      const double min_gap = 0.5 * (in_lane[i]->length + in_lane[i - 1]->length) +
                             in_lane[i]->params.min_gap;
      if (in_lane[i]->s < in_lane[i - 1]->s + min_gap)
        in_lane[i]->s = in_lane[i - 1]->s + min_gap;
    }
  }
}

}  // namespace

SimLog run(const Scenario& sc_in, const SimOptions& opt) {
  Scenario sc = sc_in;
  sc.validate();
  const std::uint64_t seed = opt.seed ? opt.seed : sc.seed;

  SimLog log;
  log.scenario = sc.name;
  log.heuristic = to_string(opt.heuristic);
  log.seed = seed;

  if (opt.perturb) perturb_agents(sc, seed, opt.perturb->first, opt.perturb->second);

  VehicleParams vp_map = sc.vehicle;
  vp_map.eta_regen = 0.0;
  const CostToGoMap map =
      build_cost_to_go(vp_map, sc.profile, sc.grid, sc.goal_s, {});
  const Heuristic h =
      Heuristic::make(opt.heuristic, &map, sc.vehicle, sc.profile, sc.goal_s);
  PlannerConfig pcfg = sc.planner;
  pcfg.heuristic_kind = opt.heuristic;
  pcfg.allow_lane_change = opt.allow_lane_change;
  const ObstacleSet statics{{}, sc.lights, sc.limits, sc.bans};

  const double dt = opt.tick;
  const auto rep_ticks = static_cast<long>(std::lround(sc.replan.t_rep / dt));
  if (rep_ticks < 1 || std::abs(rep_ticks * dt - sc.replan.t_rep) > 1e-9)
    throw std::invalid_argument("run: t_rep must be an exact multiple of the tick");

  Trajectory current;
  bool have_traj = false;
  double cum_energy = 0.0;
  bool prev_l_integer = true;
  double t_prev = 0.0;

  auto do_replan = [&](long k, double t) {
    const int cycle = static_cast<int>(k / rep_ticks);
    double err = 0.0;
    if (opt.perception == PerceptionMode::alternating)
      err = (cycle % 2 == 0 ? 1.0 : -1.0) * sc.replan.pc.ds_max;
    std::vector<VehicleObservation> obs_list;
    obs_list.reserve(sc.agents.size());
    for (const auto& a : sc.agents)
      obs_list.push_back({a.s + err, a.v, static_cast<double>(a.lane), a.length});
    const ObstacleSet obs = predict(obs_list, t, statics);

    PlanStart measured;
    measured.t = t;
    measured.s = sc.ego.s0;
    measured.l = sc.ego.lane;
    measured.v = sc.ego.v0;

    ReplanOutcome oc =
        replan_step(t, have_traj ? &current : nullptr, measured, obs, h,
                    sc.replan, pcfg, sc.grid, sc.vehicle, sc.rules, sc.profile);
    bool stitched = true;
    if (!have_traj) {
      current = oc.trajectory;
      have_traj = true;
    } else {
      try {
        current = stitch(current, oc.trajectory, oc.anchor_t, sc.grid);
      } catch (const std::exception&) {
        stitched = false;  // keep the old plan
      }
    }
    ReplanRecord rec;
    rec.cycle = cycle;
    rec.t0 = t;
    rec.anchor_t = oc.anchor.t;
    rec.anchor_s = oc.anchor.s;
    rec.anchor_l = oc.anchor.l;
    rec.anchor_v = oc.anchor.v;
    rec.nodes_expanded = oc.plan_result.nodes_expanded;
    rec.termination = oc.plan_result.termination;
    rec.fallback = oc.fallback || !stitched;
    rec.reached_progress = oc.plan_result.reached_progress;
    rec.wall_seconds = oc.plan_result.planning_time;
    log.cycles.push_back(rec);
  };

  const auto max_ticks = static_cast<long>(std::lround(opt.max_time / dt));
  for (long k = 0; k <= max_ticks; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (k > 0) {
      const TrajectoryState ego_prev = current.state_at(t - dt);
      step_agents(sc.agents, sc.lights, dt, t - dt, &ego_prev, sc.rules.l_ego);
    }
    if (k % rep_ticks == 0) do_replan(k, t);

    const TrajectoryState ego = current.state_at(t);
    if (k > 0)
      cum_energy += trajectory_energy(current, sc.vehicle, sc.profile, t_prev, t);
    t_prev = t;

    const bool now_integer = std::abs(ego.l - std::round(ego.l)) < 1e-9;
    if (prev_l_integer && !now_integer) ++log.lane_changes;
    prev_l_integer = now_integer;

    for (std::size_t i = 0; i < sc.agents.size(); ++i) {
      const auto& a = sc.agents[i];
      if (std::abs(ego.l - a.lane) >= 1.0) continue;
      const double gap = std::abs(ego.s - a.s) - 0.5 * (sc.rules.l_ego + a.length);
      if (gap <= 0.0) {
        log.aborted = true;
        log.abort_reason = "ego overlaps agent " + std::to_string(i) + " at t=" +
                           std::to_string(t);
        break;
      }
    }

    if (opt.record_ticks)
      log.ticks.push_back({t, ego.s, ego.l, ego.v, ego.a,
                           cum_energy + log.lane_changes * sc.vehicle.c_lc});
    log.end_time = t;
    if (log.aborted) break;
    if (ego.s >= sc.road_length) {
      log.completed = true;
      log.travel_time = t;
      break;
    }
  }

  log.total_cost = cum_energy + log.lane_changes * sc.vehicle.c_lc;
  return log;
}

}  // namespace stp
