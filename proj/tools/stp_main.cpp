#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stp/io.hpp"
#include "stp/sim.hpp"

namespace fs = std::filesystem;

namespace {

std::string resolve_scenario(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("STP_SCENARIO_DIR")) {
    const fs::path alt = fs::path(dir) / path;
    if (fs::exists(alt)) return alt.string();
    const fs::path alt_json = fs::path(dir) / (path + ".json");
    if (fs::exists(alt_json)) return alt_json.string();
  }
  return path;  // let the loader report the failure
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct BenchRow {
  std::string heuristic;
  double plan_ms_mean = 0, plan_ms_std = 0, plan_ms_median = 0;
  double nodes_mean = 0, nodes_std = 0, nodes_median = 0;
  double cost_kj_mean = 0, cost_kj_std = 0;
  double travel_mean = 0, travel_std = 0;
  int runs = 0, failures = 0;
};

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = xs.empty() ? 0.0
                    : std::accumulate(xs.begin(), xs.end(), 0.0) /
                          static_cast<double>(xs.size());
  if (xs.size() < 2) {
    sd = 0.0;
    return;
  }
  double acc = 0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  sd = std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stp: space-time motion planner and closed-loop traffic simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::string heuristic_name = "dp";
  std::uint64_t seed = 0;
  int repeats = 20;
  double perturb_pos = 0.0, perturb_vel = 0.0;
  bool dump_tree = false;
  bool no_lane_change = false;
  bool adversarial = false;
  std::vector<std::string> bench_heuristics;

  auto add_common = [&](CLI::App* cmd, bool with_heuristic = true) {
    cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    if (with_heuristic)
      cmd->add_option("--heuristic", heuristic_name, "dp|mb|zero");
  };

  CLI::App* plan_cmd = app.add_subcommand("plan", "plan once from the scenario start");
  add_common(plan_cmd);
  plan_cmd->add_flag("--dump-tree", dump_tree, "write expanded search tree CSV");
  plan_cmd->add_flag("--no-lane-change", no_lane_change, "disable lateral expansion");

  CLI::App* sim_cmd = app.add_subcommand("simulate", "closed-loop run");
  add_common(sim_cmd);
  sim_cmd->add_option("--seed", seed, "randomization seed (0 = scenario seed)");
  sim_cmd->add_option("--perturb-pos", perturb_pos, "sigma of agent position perturbation [m]");
  sim_cmd->add_option("--perturb-vel", perturb_vel, "sigma of agent velocity perturbation [m/s]");
  sim_cmd->add_flag("--adversarial-error", adversarial,
                    "worst-case alternating measurement error");
  sim_cmd->add_flag("--no-lane-change", no_lane_change, "disable lateral expansion");

  CLI::App* bench_cmd = app.add_subcommand("bench", "seeded heuristic comparison");
  add_common(bench_cmd, false);
  bench_cmd->add_option("--heuristic", bench_heuristics, "heuristics to compare (repeatable)");
  bench_cmd->add_option("--repeats", repeats, "number of seeded perturbations")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--perturb-pos", perturb_pos, "sigma of position perturbation [m]");
  bench_cmd->add_option("--perturb-vel", perturb_vel, "sigma of velocity perturbation [m/s]");

  CLI::App* heat_cmd = app.add_subcommand("heatmap", "dump the cost-to-go map as CSV");
  add_common(heat_cmd, false);

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    const stp::Scenario sc = stp::load_scenario(resolve_scenario(scenario_path));
    const auto out = [&](const std::string& name) {
      return (fs::path(out_dir) / name).string();
    };

    if (*plan_cmd) {
      const auto kind = stp::heuristic_kind_from_string(heuristic_name);
      stp::VehicleParams vp_map = sc.vehicle;
      vp_map.eta_regen = 0.0;
      const stp::CostToGoMap map =
          stp::build_cost_to_go(vp_map, sc.profile, sc.grid, sc.goal_s);
      const stp::Heuristic h =
          stp::Heuristic::make(kind, &map, sc.vehicle, sc.profile, sc.goal_s);
      stp::PlannerConfig cfg = sc.planner;
      cfg.heuristic_kind = kind;
      cfg.allow_lane_change = !no_lane_change;

      std::vector<stp::VehicleObservation> obs_list;
      for (const auto& a : sc.agents)
        obs_list.push_back({a.s, a.v, static_cast<double>(a.lane), a.length});
      const stp::ObstacleSet obs = stp::predict(
          obs_list, 0.0, stp::ObstacleSet{{}, sc.lights, sc.limits, sc.bans});

      stp::PlanStart start{0.0, sc.ego.s0, static_cast<double>(sc.ego.lane),
                           sc.ego.v0, stp::LaneDir::none};
      stp::SearchTrace trace;
      const stp::PlanResult res =
          stp::plan(start, obs, h, cfg, sc.grid, sc.vehicle, sc.rules,
                    sc.replan.pc, sc.profile, dump_tree ? &trace : nullptr);

      stp::write_file(out("trajectory.csv"), stp::trajectory_to_csv(res.trajectory));
      if (dump_tree) stp::write_file(out("tree.csv"), stp::trace_to_csv(trace));
      std::printf("plan: %s, %ld nodes expanded, cost %s kJ, progress %s, %.1f ms\n",
                  stp::to_string(res.termination), res.nodes_expanded,
                  stp::fmt6(res.trajectory.total_cost / 1000.0).c_str(),
                  stp::fmt6(res.reached_progress).c_str(),
                  res.planning_time * 1000.0);
      return 0;
    }

    if (*sim_cmd) {
      stp::SimOptions opt;
      opt.heuristic = stp::heuristic_kind_from_string(heuristic_name);
      opt.seed = seed;
      if (perturb_pos > 0 || perturb_vel > 0)
        opt.perturb = std::make_pair(perturb_pos, perturb_vel);
      if (adversarial) opt.perception = stp::PerceptionMode::alternating;
      opt.allow_lane_change = !no_lane_change;

      const stp::SimLog log = stp::run(sc, opt);
      stp::write_file(out("simlog.json"), stp::simlog_to_json(log));
      stp::write_file(out("ticks.csv"), stp::ticks_to_csv(log));
      stp::write_file(out("timing.csv"), stp::timing_to_csv(log));
      std::printf("simulate: %s in %s s, cost %s kJ, %zu cycles, mean nodes %s\n",
                  log.completed ? "completed" : (log.aborted ? "ABORTED" : "capped"),
                  stp::fmt6(log.end_time).c_str(),
                  stp::fmt6(log.total_cost / 1000.0).c_str(), log.cycles.size(),
                  stp::fmt6(log.mean_nodes()).c_str());
      if (log.aborted) {
        std::fprintf(stderr, "abort: %s\n", log.abort_reason.c_str());
        return 2;
      }
      return 0;
    }

    if (*bench_cmd) {
      if (bench_heuristics.empty()) bench_heuristics = {"dp", "mb"};
      if (perturb_pos == 0 && perturb_vel == 0) {
        perturb_pos = 10.0;
        perturb_vel = 1.0;
      }
      std::vector<BenchRow> rows;
      bool any_failure = false;
      for (const std::string& name : bench_heuristics) {
        BenchRow row;
        row.heuristic = name;
        std::vector<double> plan_ms, nodes, cost_kj, travel;
        std::vector<double> nodes_all_cycles, plan_ms_all_cycles;
        for (int r = 0; r < repeats; ++r) {
          stp::SimOptions opt;
          opt.heuristic = stp::heuristic_kind_from_string(name);
          opt.seed = static_cast<std::uint64_t>(r + 1);
          opt.perturb = std::make_pair(perturb_pos, perturb_vel);
          opt.record_ticks = false;
          const stp::SimLog log = stp::run(sc, opt);
          ++row.runs;
          if (log.aborted || !log.completed) {
            ++row.failures;
            any_failure = true;
            continue;
          }
          plan_ms.push_back(log.mean_plan_seconds() * 1000.0);
          nodes.push_back(log.mean_nodes());
          cost_kj.push_back(log.total_cost / 1000.0);
          travel.push_back(log.travel_time);
          for (const auto& c : log.cycles) {
            nodes_all_cycles.push_back(static_cast<double>(c.nodes_expanded));
            plan_ms_all_cycles.push_back(c.wall_seconds * 1000.0);
          }
        }
        mean_std(plan_ms, row.plan_ms_mean, row.plan_ms_std);
        mean_std(nodes, row.nodes_mean, row.nodes_std);
        mean_std(cost_kj, row.cost_kj_mean, row.cost_kj_std);
        mean_std(travel, row.travel_mean, row.travel_std);
        row.nodes_median = median(nodes_all_cycles);
        row.plan_ms_median = median(plan_ms_all_cycles);
        rows.push_back(row);
      }

      std::printf("%-6s %16s %16s %18s %16s\n", "h(n)", "plan time [ms]",
                  "nodes exp.", "cost [kJ]", "trav. time [s]");
      for (const auto& r : rows)
        std::printf("%-6s %8.1f +- %-6.1f %7.1f +- %-6.1f %8.1f +- %-7.1f %7.1f +- %-5.1f\n",
                    r.heuristic.c_str(), r.plan_ms_mean, r.plan_ms_std,
                    r.nodes_mean, r.nodes_std, r.cost_kj_mean, r.cost_kj_std,
                    r.travel_mean, r.travel_std);

      nlohmann::ordered_json jr;
      jr["scenario"] = sc.name;
      jr["repeats"] = repeats;
      nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        nlohmann::ordered_json one;
        one["heuristic"] = r.heuristic;
        one["runs"] = r.runs;
        one["failures"] = r.failures;
        one["nodes_mean"] = stp::fmt6(r.nodes_mean);
        one["nodes_stddev"] = stp::fmt6(r.nodes_std);
        one["nodes_median"] = stp::fmt6(r.nodes_median);
        one["cost_kJ_mean"] = stp::fmt6(r.cost_kj_mean);
        one["cost_kJ_stddev"] = stp::fmt6(r.cost_kj_std);
        one["travel_time_mean"] = stp::fmt6(r.travel_mean);
        one["travel_time_stddev"] = stp::fmt6(r.travel_std);
        jrows.push_back(one);
      }
      jr["rows"] = jrows;
      stp::write_file(out("bench_results.json"), jr.dump(2) + "\n");

      std::string timing = "heuristic,plan_ms_mean,plan_ms_median\n";
      for (const auto& r : rows)
        timing += r.heuristic + "," + stp::fmt6(r.plan_ms_mean) + "," +
                  stp::fmt6(r.plan_ms_median) + "\n";
      stp::write_file(out("bench_timing.csv"), timing);
      return any_failure ? 2 : 0;
    }

    if (*heat_cmd) {
      stp::VehicleParams vp_map = sc.vehicle;
      vp_map.eta_regen = 0.0;
      const stp::CostToGoMap map =
          stp::build_cost_to_go(vp_map, sc.profile, sc.grid, sc.goal_s);
      stp::write_file(out("cost_to_go.csv"), stp::cost_to_go_to_csv(map));
      std::printf("heatmap: %d rows x %d velocities -> %s\n", map.rows + 1,
                  map.v_steps + 1, out("cost_to_go.csv").c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
