#ifndef STP_SPACETIME_HPP
#define STP_SPACETIME_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace stp {

// Lateral coordinate convention: lane centers are integers, 1 = rightmost
// lane, n_lanes = leftmost lane. Fractional values are in-progress lane
// changes (1.5 = halfway between lanes 1 and 2).

struct Configuration {
  double t = 0.0;  // time [s]
  double s = 0.0;  // longitudinal position along the road [m]
  double l = 1.0;  // lane coordinate [-]
};

// Grid discretization and per-edge expansion limits.
struct GridSpec {
  double dv = 1.0;        // velocity step [m/s]
  double ds_grid = 10.0;  // distance grid step [m]
  double dt_grid = 1.0;   // time grid step [s]
  double ds_exp = 10.0;   // distance expansion limit [m]
  double dt_exp = 2.0;    // time expansion limit [s]
  int n_lanes = 1;        // lane count
  double v_max = 14.0;    // maximum velocity [m/s], exact multiple of dv

  int v_steps() const { return static_cast<int>(v_max / dv + 0.5); }
  void validate() const;
};

enum class LaneDir : std::uint8_t { right = 0, none = 1, left = 2 };

// Discrete identity of a search state; remainders are deliberately excluded,
// velocity index and lane-change direction deliberately included.
struct NodeKey {
  std::int32_t v_k = 0;
  std::int32_t t_k = 0;
  std::int32_t s_k = 0;
  std::int32_t l_k = 0;
  LaneDir l_dir = LaneDir::none;

  friend bool operator==(const NodeKey&, const NodeKey&) = default;
  std::uint64_t packed() const {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v_k)) << 44) ^
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t_k)) << 24) ^
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s_k)) << 4) ^
           (static_cast<std::uint64_t>(l_k) << 2) ^
           static_cast<std::uint64_t>(l_dir);
  }
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& k) const {
    std::uint64_t x = k.packed();
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

// Hybrid-A* node: grid indices plus continuous remainders, so that the exact
// state t = t_k*dt_grid + t_r (same for s, l) survives every expansion.
struct SearchNode {
  std::int32_t v_k = 0;
  std::int32_t t_k = 0;
  std::int32_t s_k = 0;
  std::int32_t l_k = 0;
  std::int32_t parent = -1;  // arena index of parent node, -1 for the root
  double t_r = 0.0;
  double s_r = 0.0;
  double l_r = 0.0;
  LaneDir l_dir = LaneDir::none;
  double g = 0.0;  // cost-to-come [J]
  double f = 0.0;  // g + heuristic [J]

  double t(const GridSpec& gs) const { return t_k * gs.dt_grid + t_r; }
  double s(const GridSpec& gs) const { return s_k * gs.ds_grid + s_r; }
  double l() const { return l_k + l_r; }  // lane grid step is 1
  double v(const GridSpec& gs) const { return v_k * gs.dv; }
};

NodeKey node_key(const SearchNode& n);

// Splits a non-negative continuous value into grid index and remainder with
// index*step + remainder == value and 0 <= remainder < step.
std::pair<std::int64_t, double> snap(double value, double step);

// Remainder-arithmetic advance: adds delta to (index, remainder) carrying
// whole grid steps into the index, without reconstructing the full value.
void advance_snapped(std::int32_t& index, double& remainder, double delta,
                     double step);

// One constant-acceleration motion primitive. s evolves quadratically from
// s_start, l linearly from l_start to l_end over [t_start, t_end].
struct TrajectorySegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double s_start = 0.0;
  double v_start = 0.0;
  double v_end = 0.0;
  double a = 0.0;
  double l_start = 1.0;
  double l_end = 1.0;

  double duration() const { return t_end - t_start; }
  double s_at(double t) const {
    const double dt = t - t_start;
    return s_start + v_start * dt + 0.5 * a * dt * dt;
  }
  double v_at(double t) const { return v_start + a * (t - t_start); }
  double l_at(double t) const {
    const double dur = duration();
    if (dur <= 0.0) return l_start;
    return l_start + (l_end - l_start) * (t - t_start) / dur;
  }
  double s_end() const { return s_at(t_end); }
  double l_rate() const {
    const double dur = duration();
    return dur > 0.0 ? (l_end - l_start) / dur : 0.0;
  }
};

struct TrajectoryState {
  double t = 0.0, s = 0.0, l = 1.0, v = 0.0, a = 0.0;
  double l_rate = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySegment> segments;
  double total_cost = 0.0;  // [J]

  bool empty() const { return segments.empty(); }
  double start_time() const;
  double end_time() const;
  bool covers(double t) const;
  // State at time t; clamps to the first/last instant within 1e-9, throws
  // std::out_of_range beyond that.
  TrajectoryState state_at(double t) const;
  // Checks time contiguity and C0 continuity of s, l, v at joints.
  void validate() const;
};

}  // namespace stp

template <>
struct std::hash<stp::NodeKey> {
  std::size_t operator()(const stp::NodeKey& k) const {
    return stp::NodeKeyHash{}(k);
  }
};

#endif  // STP_SPACETIME_HPP
