#include "stp/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace stp {

void VehicleParams::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(std::string("VehicleParams: ") + msg); };
  if (m <= 0) fail("m must be > 0");
  if (!(a_min < 0 && 0 < a_max)) fail("need a_min < 0 < a_max");
  if (t_lc <= 0) fail("t_lc must be > 0");
  if (eta_drive <= 0 || eta_drive > 1) fail("eta_drive must be in (0, 1]");
  if (eta_regen < 0 || eta_regen > 1) fail("eta_regen must be in [0, 1]");
  if (c_rr < 0 || c_dA < 0 || rho < 0) fail("resistance coefficients must be >= 0");
  if (c_lc < 0) fail("c_lc must be >= 0");
  if (p_aux < 0) fail("p_aux must be >= 0");
}

void RoadProfile::validate() const {
  if (samples.empty())
    throw std::invalid_argument("RoadProfile: needs at least one sample");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (std::abs(samples[i].slope) >= 0.2)
      throw std::invalid_argument("RoadProfile: |slope| must be < 0.2 rad");
    if (samples[i].speed_limit <= 0)
      throw std::invalid_argument("RoadProfile: speed limit must be > 0");
    if (i > 0 && samples[i].s <= samples[i - 1].s)
      throw std::invalid_argument("RoadProfile: s must be strictly increasing");
  }
}

namespace {
const RoadProfile::Sample& sample_at(const RoadProfile& p, double s) {
  // Last sample with sample.s <= s; the first sample extends backwards.
  std::size_t lo = 0;
  for (std::size_t i = 1; i < p.samples.size() && p.samples[i].s <= s; ++i) lo = i;
  return p.samples[lo];
}
}  // namespace

double RoadProfile::slope_at(double s) const { return sample_at(*this, s).slope; }

double RoadProfile::speed_limit_at(double s) const {
  return sample_at(*this, s).speed_limit;
}

double RoadProfile::min_grade_rolling(double c_rr) const {
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& smp : samples)
    mn = std::min(mn, c_rr * std::cos(smp.slope) + std::sin(smp.slope));
  return mn;
}

double resistive_force(const VehicleParams& vp, double v, double slope) {
  if (v < 0) throw std::domain_error("resistive_force: v must be >= 0");
  return vp.m * kGravity * (vp.c_rr * std::cos(slope) + std::sin(slope)) +
         0.5 * vp.rho * vp.c_dA * v * v;
}

Transition transition(double v_i, double v_f, const GridSpec& gs) {
  if (v_i < 0 || v_f < 0 || v_i > gs.v_max + 1e-9 || v_f > gs.v_max + 1e-9)
    throw std::domain_error("transition: velocities must be within [0, v_max]");
  const double v_bar = 0.5 * (v_i + v_f);
  Transition tr;
  if (v_bar < gs.ds_exp / gs.dt_exp) {
    tr.dt = gs.dt_exp;
    tr.ds = v_bar * tr.dt;
  } else {
    tr.ds = gs.ds_exp;
    tr.dt = tr.ds / v_bar;
  }
  tr.a = (v_f - v_i) / tr.dt;
  return tr;
}

namespace {

// Integral of p(t) = c0*v(t) + c2*v(t)^3 over [t1, t2] with v(t) = v_i + a*t.
double power_integral(double c0, double c2, double v_i, double a, double t1,
                      double t2) {
  if (a != 0.0) {
    const double v1 = v_i + a * t1;
    const double v2 = v_i + a * t2;
    const double v1sq = v1 * v1, v2sq = v2 * v2;
    return c0 * (v2sq - v1sq) / (2.0 * a) +
           c2 * (v2sq * v2sq - v1sq * v1sq) / (4.0 * a);
  }
  return (c0 * v_i + c2 * v_i * v_i * v_i) * (t2 - t1);
}

}  // namespace

double cost_trans(const VehicleParams& vp, double v_i, double v_f, double dt,
                  double slope) {
  if (dt <= 0.0) return 0.0;
  const double a = (v_f - v_i) / dt;
  // F_m(t)*v(t) = (c0 + c2*v^2)*v with c0 = m*a + grade/rolling force.
  const double c0 = vp.m * a + vp.m * kGravity * (vp.c_rr * std::cos(slope) + std::sin(slope));
  const double c2 = 0.5 * vp.rho * vp.c_dA;

  // Power sign changes where c0 + c2*v^2 = 0 (v >= 0 throughout a segment,
  // so v = 0 contributes nothing either way).
  std::vector<double> cuts{0.0, dt};
  if (c0 < 0.0 && c2 > 0.0 && a != 0.0) {
    const double v_star = std::sqrt(-c0 / c2);
    const double t_star = (v_star - v_i) / a;
    if (t_star > 1e-12 && t_star < dt - 1e-12) cuts.insert(cuts.begin() + 1, t_star);
  }

  double energy = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double t1 = cuts[i], t2 = cuts[i + 1];
    const double w = power_integral(c0, c2, v_i, a, t1, t2);
    const double t_mid = 0.5 * (t1 + t2);
    const double v_mid = v_i + a * t_mid;
    const double p_mid = (c0 + c2 * v_mid * v_mid) * v_mid;
    if (p_mid >= 0.0)
      energy += w / vp.eta_drive;
    else
      energy += w * vp.eta_regen;
  }
  return energy;
}

bool check_internal_limits(const VehicleParams& vp, double a, double v_f,
                           const GridSpec& gs) {
  if (v_f < -1e-12 || v_f > gs.v_max + 1e-9) return false;
  return a >= vp.a_min - 1e-12 && a <= vp.a_max + 1e-12;
}

double lane_change_progress(double dt, double t_lc, double progress_so_far) {
  if (dt <= 0 || t_lc <= 0)
    throw std::domain_error("lane_change_progress: dt and t_lc must be > 0");
  const double capped = std::min(progress_so_far + dt / t_lc, 1.0);
  return capped - progress_so_far;
}

double trajectory_energy(const Trajectory& traj, const VehicleParams& vp,
                         const RoadProfile& profile, double t1, double t2) {
  if (t2 <= t1) return 0.0;
  double energy = 0.0;
  for (const auto& seg : traj.segments) {
    const double a = std::max(t1, seg.t_start);
    const double b = std::min(t2, seg.t_end);
    if (b - a <= 1e-12) continue;
    energy += cost_trans(vp, seg.v_at(a), seg.v_at(b), b - a,
                         profile.slope_at(seg.s_at(a)));
  }
  return energy;
}

}  // namespace stp
