#include "stp/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace stp {

void PlannerConfig::validate() const {
  if (s_hor <= 0 || t_hor <= 0 || timeout <= 0)
    throw std::invalid_argument("PlannerConfig: horizons and timeout must be > 0");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::horizon_reached: return "horizon_reached";
    case Termination::open_exhausted: return "open_exhausted";
    case Termination::timeout: return "timeout";
  }
  return "?";
}

double horizon_progress(const SearchNode& n, const PlanStart& start,
                        const PlannerConfig& cfg, const GridSpec& gs) {
  const double t_rel = n.t(gs) - start.t;
  const double s_rel = n.s(gs) - start.s;
  return std::min(1.0, std::max(s_rel / cfg.s_hor, t_rel / cfg.t_hor));
}

namespace {

struct Candidate {
  SearchNode node;
  TrajectorySegment seg;
};

SearchNode make_child(const SearchNode& n, const Transition& tr, int vf_idx,
                      double l_new, LaneDir dir_new, double g_new,
                      const Heuristic& h, const GridSpec& gs) {
  SearchNode c = n;
  c.v_k = vf_idx;
  c.parent = -1;
  advance_snapped(c.t_k, c.t_r, tr.dt, gs.dt_grid);
  advance_snapped(c.s_k, c.s_r, tr.ds, gs.ds_grid);
  const auto [lk, lr] = snap(l_new, 1.0);
  c.l_k = static_cast<std::int32_t>(lk);
  c.l_r = lr;
  c.l_dir = dir_new;
  c.g = g_new;
  c.f = g_new + h(c.s(gs), vf_idx * gs.dv);
  return c;
}

// Kinematically feasible children before the collision filter.
std::vector<Candidate> expand_candidates(const SearchNode& n,
                                         const Heuristic& h,
                                         const GridSpec& gs,
                                         const VehicleParams& vp,
                                         const RoadProfile& profile,
                                         bool allow_lane_change) {
  std::vector<Candidate> out;
  const double v_i = n.v(gs);
  const double t0 = n.t(gs);
  const double s0 = n.s(gs);
  const double l0 = n.l();
  const double slope = profile.slope_at(s0);
  const int v_steps = gs.v_steps();
  out.reserve(static_cast<std::size_t>(v_steps + 1) * (n.l_dir == LaneDir::none ? 3 : 1));

  // Edge weights never credit regeneration: negative weights would let the
  // search farm energy from brake/accelerate cycles and break best-first
  // optimality. Recovered energy still shows up in the simulation metrics.
  VehicleParams vp_edges = vp;
  vp_edges.eta_regen = 0.0;

  for (int vf_idx = 0; vf_idx <= v_steps; ++vf_idx) {
    const double v_f = vf_idx * gs.dv;
    const Transition tr = transition(v_i, v_f, gs);
    if (!check_internal_limits(vp, tr.a, v_f, gs)) continue;
    const double edge_cost =
        cost_trans(vp_edges, v_i, v_f, tr.dt, slope) + vp.p_aux * tr.dt;

    auto emit = [&](double l_new, LaneDir dir_new, double extra_cost) {
      Candidate c;
      c.node = make_child(n, tr, vf_idx, l_new, dir_new,
                          n.g + edge_cost + extra_cost, h, gs);
      c.seg = TrajectorySegment{t0, t0 + tr.dt, s0, v_i, v_f, tr.a, l0, l_new};
      out.push_back(std::move(c));
    };

    if (n.l_dir != LaneDir::none) {
      // Lane change in progress: every variant advances it, no new branching.
      const bool left = n.l_dir == LaneDir::left;
      const double target = left ? n.l_k + 1.0 : static_cast<double>(n.l_k);
      const double remaining = left ? target - l0 : l0 - target;
      const double dl = lane_change_progress(tr.dt, vp.t_lc, 1.0 - remaining);
      const bool done = remaining - dl <= 1e-12;
      const double l_new = done ? target : (left ? l0 + dl : l0 - dl);
      emit(l_new, done ? LaneDir::none : n.l_dir, 0.0);
    } else {
      emit(l0, LaneDir::none, 0.0);
      if (allow_lane_change) {
        const double dl = lane_change_progress(tr.dt, vp.t_lc, 0.0);
        if (n.l_k > 1) {  // lane change right (toward lane 1)
          const bool done = 1.0 - dl <= 1e-12;
          emit(done ? n.l_k - 1.0 : l0 - dl, done ? LaneDir::none : LaneDir::right,
               vp.c_lc);
        }
        if (n.l_k < gs.n_lanes) {  // lane change left
          const bool done = 1.0 - dl <= 1e-12;
          emit(done ? n.l_k + 1.0 : l0 + dl, done ? LaneDir::none : LaneDir::left,
               vp.c_lc);
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<SearchNode> expand(const SearchNode& n, const ObstacleSet& obs,
                               const Heuristic& h, const GridSpec& gs,
                               const VehicleParams& vp, const RuleConfig& rc,
                               const PredictionConfig& pc,
                               const RoadProfile& profile,
                               bool allow_lane_change) {
  std::vector<SearchNode> out;
  for (auto& cand : expand_candidates(n, h, gs, vp, profile, allow_lane_change)) {
    if (check_all(cand.seg, obs, rc, pc).pass) out.push_back(cand.node);
  }
  return out;
}

TrajectorySegment edge_segment(const SearchNode& parent,
                               const SearchNode& child, const GridSpec& gs) {
  const double t0 = parent.t(gs);
  const double t1 = child.t(gs);
  const double dt = t1 - t0;
  if (dt <= 0) throw std::logic_error("edge_segment: non-positive duration");
  const double v0 = parent.v(gs);
  const double v1 = child.v(gs);
  return TrajectorySegment{t0,          t1, parent.s(gs), v0, v1,
                           (v1 - v0) / dt, parent.l(),   child.l()};
}

Trajectory reconstruct(const std::vector<SearchNode>& arena,
                       std::int32_t leaf_idx, const GridSpec& gs) {
  std::vector<std::int32_t> chain;
  std::int32_t idx = leaf_idx;
  while (idx >= 0) {
    if (static_cast<std::size_t>(idx) >= arena.size() ||
        chain.size() > arena.size())
      throw std::logic_error("reconstruct: broken parent chain");
    chain.push_back(idx);
    idx = arena[static_cast<std::size_t>(idx)].parent;
  }
  std::reverse(chain.begin(), chain.end());

  Trajectory traj;
  traj.total_cost = arena[static_cast<std::size_t>(leaf_idx)].g;
  for (std::size_t i = 1; i < chain.size(); ++i)
    traj.segments.push_back(edge_segment(arena[chain[i - 1]], arena[chain[i]], gs));
  return traj;
}

Trajectory stop_profile(const PlanStart& start, const VehicleParams& vp,
                        const RoadProfile& profile, double cover_until_t) {
  Trajectory traj;
  double t = start.t;
  double s = start.s;
  double cost = 0.0;
  if (start.v > 0.0) {
    const double dur = -start.v / vp.a_min;
    traj.segments.push_back(TrajectorySegment{t, t + dur, s, start.v, 0.0,
                                              vp.a_min, start.l, start.l});
    cost += cost_trans(vp, start.v, 0.0, dur, profile.slope_at(s));
    s += 0.5 * start.v * dur;
    t += dur;
  }
  const double hold_end = std::max(cover_until_t, t + 1e-3);
  traj.segments.push_back(
      TrajectorySegment{t, hold_end, s, 0.0, 0.0, 0.0, start.l, start.l});
  traj.total_cost = cost;
  return traj;
}

PlanResult plan(const PlanStart& start, const ObstacleSet& obs,
                const Heuristic& h, const PlannerConfig& cfg,
                const GridSpec& gs, const VehicleParams& vp,
                const RuleConfig& rc, const PredictionConfig& pc,
                const RoadProfile& profile, SearchTrace* trace) {
  cfg.validate();
  gs.validate();
  const auto t_begin = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
        .count();
  };

  const bool fractional = std::abs(start.l - std::round(start.l)) > 1e-9;
  if (fractional == (start.l_dir == LaneDir::none))
    throw std::invalid_argument("plan: start l_dir inconsistent with lane coordinate");

  // Start pose must be collision-free (probe a short hold at the start state).
  {
    TrajectorySegment probe{start.t, start.t + 1e-3, start.s, start.v,
                            start.v, 0.0,           start.l, start.l};
    CollisionReport rep = check_all(probe, obs, rc, pc);
    if (!rep.pass)
      throw std::runtime_error("plan: start state in collision with " + rep.violator);
  }

  std::vector<SearchNode> arena;
  std::vector<std::uint8_t> closed_flag;
  std::unordered_map<NodeKey, std::int32_t, NodeKeyHash> by_key;

  SearchNode root;
  {
    const auto [tk, tr] = snap(start.t, gs.dt_grid);
    const auto [sk, sr] = snap(start.s, gs.ds_grid);
    const auto [lk, lr] = snap(start.l, 1.0);
    root.t_k = static_cast<std::int32_t>(tk);
    root.t_r = tr;
    root.s_k = static_cast<std::int32_t>(sk);
    root.s_r = sr;
    root.l_k = static_cast<std::int32_t>(lk);
    root.l_r = lr;
    root.l_dir = start.l_dir;
    // Observed velocity is rounded to the nearest grid value; no remainder is
    // kept for v.
    root.v_k = std::clamp(static_cast<std::int32_t>(std::lround(start.v / gs.dv)),
                          0, static_cast<std::int32_t>(gs.v_steps()));
    root.parent = -1;
    root.g = 0.0;
    root.f = h(start.s, root.v_k * gs.dv);
  }
  arena.push_back(root);
  closed_flag.push_back(0);
  by_key.emplace(node_key(root), 0);

  struct HeapEntry {
    double f;
    double h_val;
    std::uint64_t seq;
    std::int32_t idx;
  };
  auto worse = [](const HeapEntry& a, const HeapEntry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.h_val != b.h_val) return a.h_val > b.h_val;
    return a.seq > b.seq;
  };
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(worse)> open(worse);
  std::uint64_t seq = 0;
  open.push({root.f, root.f - root.g, seq++, 0});

  PlanResult result;
  result.termination = Termination::open_exhausted;

  std::int32_t best_idx = 0;
  double best_progress = horizon_progress(root, start, cfg, gs);
  double best_f = root.f;
  auto consider_best = [&](std::int32_t idx) {
    const SearchNode& n = arena[static_cast<std::size_t>(idx)];
    const double p = horizon_progress(n, start, cfg, gs);
    if (p > best_progress || (p == best_progress && n.f < best_f)) {
      best_progress = p;
      best_f = n.f;
      best_idx = idx;
    }
  };

  while (!open.empty()) {
    const HeapEntry top = open.top();
    open.pop();
    SearchNode node = arena[static_cast<std::size_t>(top.idx)];
    if (closed_flag[static_cast<std::size_t>(top.idx)] || top.f != node.f)
      continue;  // stale entry

    if (result.nodes_expanded > 0 && elapsed() > cfg.timeout) {
      result.termination = Termination::timeout;
      break;
    }
    const double t_rel = node.t(gs) - start.t;
    const double s_rel = node.s(gs) - start.s;
    if (t_rel > cfg.t_hor + 1e-9 || s_rel > cfg.s_hor + 1e-9) {
      result.termination = Termination::horizon_reached;
      break;
    }

    closed_flag[static_cast<std::size_t>(top.idx)] = 1;
    ++result.nodes_expanded;
    if (trace)
      trace->push_back(TraceRow{node.t(gs), node.s(gs), node.l(), node.v(gs),
                                node.g, node.f, node.parent});

    for (auto& cand : expand_candidates(node, h, gs, vp, profile,
                                        cfg.allow_lane_change)) {
      cand.node.parent = top.idx;
      const NodeKey key = node_key(cand.node);
      auto it = by_key.find(key);
      if (it != by_key.end()) {
        if (closed_flag[static_cast<std::size_t>(it->second)]) continue;
        SearchNode& existing = arena[static_cast<std::size_t>(it->second)];
        if (cand.node.g < existing.g - 1e-12) {
          // Re-parenting: the new edge must itself be collision-free.
          if (!check_all(cand.seg, obs, rc, pc).pass) continue;
          existing = cand.node;
          open.push({existing.f, existing.f - existing.g, seq++, it->second});
          consider_best(it->second);
        }
        continue;
      }
      if (!check_all(cand.seg, obs, rc, pc).pass) continue;
      arena.push_back(cand.node);
      closed_flag.push_back(0);
      const auto idx = static_cast<std::int32_t>(arena.size() - 1);
      by_key.emplace(key, idx);
      open.push({cand.node.f, cand.node.f - cand.node.g, seq++, idx});
      consider_best(idx);
    }
  }

  result.planning_time = elapsed();
  result.reached_progress = best_progress;
  if (best_idx == 0) {
    // Nothing ever improved on the start node: boxed in. Degrade to a
    // maximal-deceleration stop followed by a hold.
    result.trajectory = stop_profile(start, vp, profile, start.t + cfg.t_hor);
    result.degraded = true;
    result.termination = Termination::open_exhausted;
  } else {
    result.trajectory = reconstruct(arena, best_idx, gs);
  }
  return result;
}

}  // namespace stp
