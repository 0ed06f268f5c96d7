#include "stp/spacetime.hpp"

#include <cmath>
#include <string>

namespace stp {

void GridSpec::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("GridSpec: " + msg); };
  if (dv <= 0 || ds_grid <= 0 || dt_grid <= 0 || ds_exp <= 0 || dt_exp <= 0)
    fail("all steps must be > 0");
  if (ds_exp < ds_grid) fail("ds_exp must be >= ds_grid");
  if (dt_exp < dt_grid) fail("dt_exp must be >= dt_grid");
  if (n_lanes < 1) fail("n_lanes must be >= 1");
  const double ratio = v_max / dv;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    fail("v_max must be an exact multiple of dv");
}

NodeKey node_key(const SearchNode& n) {
  return NodeKey{n.v_k, n.t_k, n.s_k, n.l_k, n.l_dir};
}

std::pair<std::int64_t, double> snap(double value, double step) {
  if (step <= 0.0) throw std::domain_error("snap: step must be > 0");
  if (value < 0.0) throw std::domain_error("snap: value must be >= 0");
  auto idx = static_cast<std::int64_t>(std::floor(value / step));
  double rem = value - static_cast<double>(idx) * step;
  // Guard against floor/rounding disagreement at cell boundaries.
  if (rem < 0.0) {
    idx -= 1;
    rem = value - static_cast<double>(idx) * step;
  }
  if (rem >= step) {
    idx += 1;
    rem = value - static_cast<double>(idx) * step;
    if (rem < 0.0) rem = 0.0;
  }
  return {idx, rem};
}

void advance_snapped(std::int32_t& index, double& remainder, double delta,
                     double step) {
  double sum = remainder + delta;
  auto carry = static_cast<std::int64_t>(std::floor(sum / step));
  double rem = sum - static_cast<double>(carry) * step;
  if (rem < 0.0) {
    carry -= 1;
    rem = sum - static_cast<double>(carry) * step;
  }
  if (rem >= step) {
    carry += 1;
    rem = sum - static_cast<double>(carry) * step;
    if (rem < 0.0) rem = 0.0;
  }
  index += static_cast<std::int32_t>(carry);
  remainder = rem;
}

double Trajectory::start_time() const {
  if (segments.empty()) throw std::logic_error("Trajectory: empty");
  return segments.front().t_start;
}

double Trajectory::end_time() const {
  if (segments.empty()) throw std::logic_error("Trajectory: empty");
  return segments.back().t_end;
}

bool Trajectory::covers(double t) const {
  return !segments.empty() && t >= start_time() - 1e-9 && t <= end_time() + 1e-9;
}

TrajectoryState Trajectory::state_at(double t) const {
  if (segments.empty()) throw std::logic_error("Trajectory: empty");
  if (!covers(t))
    throw std::out_of_range("Trajectory: t=" + std::to_string(t) +
                            " outside [" + std::to_string(start_time()) + ", " +
                            std::to_string(end_time()) + "]");
  const double tq = std::min(std::max(t, start_time()), end_time());
  // Segments are contiguous and few; linear scan with upper-bound semantics.
  std::size_t i = 0;
  while (i + 1 < segments.size() && tq >= segments[i].t_end) ++i;
  const TrajectorySegment& seg = segments[i];
  TrajectoryState st;
  st.t = t;
  st.s = seg.s_at(tq);
  st.v = seg.v_at(tq);
  st.l = seg.l_at(tq);
  st.a = seg.a;
  st.l_rate = seg.l_rate();
  return st;
}

void Trajectory::validate() const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    if (seg.duration() < 0.0) throw std::logic_error("Trajectory: negative segment duration");
    if (seg.v_start < -1e-9 || seg.v_end < -1e-9)
      throw std::logic_error("Trajectory: negative velocity");
    if (i == 0) continue;
    const auto& prev = segments[i - 1];
    if (std::abs(prev.t_end - seg.t_start) > 1e-9)
      throw std::logic_error("Trajectory: segments not time-contiguous");
    if (std::abs(prev.s_end() - seg.s_start) > 1e-6)
      throw std::logic_error("Trajectory: s discontinuity at joint");
    if (std::abs(prev.l_end - seg.l_start) > 1e-9)
      throw std::logic_error("Trajectory: l discontinuity at joint");
  }
}

}  // namespace stp
