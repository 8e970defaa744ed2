#include "mbr/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace mbr::kin {

namespace {
constexpr double kEps = 1e-12;

void require(bool ok, const char* msg) {
  if (!ok) throw DomainError(msg);
}
}  // namespace

void KinematicParams::validate() const {
  require(v_max > 0 && accel > 0 && decel > 0 && v_floor > 0,
          "kinematic parameters must be strictly positive");
  require(v_floor < v_max, "v_floor must be below v_max");
}

double braking_distance(double v, double decel) {
  if (decel <= 0) throw DomainError("braking_distance: decel must be > 0");
  require(v >= 0, "braking_distance: v must be >= 0");
  return v * v / (2.0 * decel);
}

bool feasible_transition(double length, double v1, double v2,
                         const KinematicParams& p) {
  p.validate();
  require(length > 0, "feasible_transition: length must be > 0");
  require(v1 >= 0 && v2 >= 0, "feasible_transition: speeds must be >= 0");
  require(v1 <= p.v_max + kEps && v2 <= p.v_max + kEps,
          "feasible_transition: speeds above v_max");
  const double rate = v2 > v1 ? p.accel : p.decel;
  return std::abs(v2 * v2 - v1 * v1) <= 2.0 * rate * length + 1e-9;
}

double Profile::time_at(double x) const {
  x = std::clamp(x, 0.0, total_length);
  double t = 0, pos = 0;
  for (const auto& ph : phases) {
    if (x <= pos + ph.length + kEps) {
      const double s = std::max(0.0, x - pos);
      if (std::abs(ph.rate) < kEps) {
        return t + (ph.v0 > kEps ? s / ph.v0 : 0.0);
      }
      // s = v0 u + r u^2 / 2  ->  u = (-v0 + sqrt(v0^2 + 2 r s)) / r
      const double disc = std::max(0.0, ph.v0 * ph.v0 + 2.0 * ph.rate * s);
      return t + (-ph.v0 + std::sqrt(disc)) / ph.rate;
    }
    pos += ph.length;
    t += ph.time;
  }
  return total_time;
}

namespace {

void push_phase(Profile& pr, double v0, double v1, double rate) {
  if (std::abs(v1 - v0) < kEps) return;
  Profile::Phase ph;
  ph.v0 = v0;
  ph.rate = rate;
  ph.time = (v1 - v0) / rate;
  ph.length = (v1 * v1 - v0 * v0) / (2.0 * rate);
  pr.phases.push_back(ph);
  pr.total_time += ph.time;
  pr.total_length += ph.length;
}

void push_cruise(Profile& pr, double v, double length) {
  if (length < kEps) return;
  Profile::Phase ph;
  ph.v0 = v;
  ph.rate = 0;
  ph.length = length;
  ph.time = length / v;
  pr.phases.push_back(ph);
  pr.total_time += ph.time;
  pr.total_length += ph.length;
}

}  // namespace

Profile fastest_profile(double length, double v1, double v2,
                        const KinematicParams& p) {
  if (!feasible_transition(length, v1, v2, p))
    throw InfeasibleTransition("fastest_profile: endpoint speeds unreachable");
  const double a = p.accel, b = p.decel;
  double vp = std::sqrt((2.0 * a * b * length + b * v1 * v1 + a * v2 * v2) /
                        (a + b));
  vp = std::min(vp, p.v_max);
  vp = std::max({vp, v1, v2});  // numeric guard; feasibility implies vp >= both
  Profile pr;
  push_phase(pr, v1, vp, a);
  const double d_dec = (vp * vp - v2 * v2) / (2.0 * b);
  const double cruise = length - pr.total_length - d_dec;
  push_cruise(pr, vp, std::max(0.0, cruise));
  push_phase(pr, vp, v2, -b);
  if (pr.phases.empty()) push_cruise(pr, std::max(v1, kEps), length);
  return pr;
}

Profile slowest_profile(double length, double v1, double v2,
                        const KinematicParams& p) {
  if (!feasible_transition(length, v1, v2, p))
    throw InfeasibleTransition("slowest_profile: endpoint speeds unreachable");
  const double a = p.accel, b = p.decel;
  // Trough from d_dec(v1 -> vt at b) + d_acc(vt -> v2 at a) = length.
  const double num = a * v1 * v1 + b * v2 * v2 - 2.0 * a * b * length;
  double vt = num > 0 ? std::sqrt(num / (a + b)) : 0.0;
  vt = std::max(vt, p.v_floor);
  Profile pr;
  // Entering below the floor (e.g. from standstill): speed up to the floor.
  if (v1 < vt - kEps)
    push_phase(pr, v1, vt, a);
  else
    push_phase(pr, v1, vt, -b);
  const double d_tail = std::abs(v2 * v2 - vt * vt) /
                        (2.0 * (v2 > vt ? a : b));
  const double crawl = length - pr.total_length - d_tail;
  if (crawl < -1e-7) {
    // Edge too short to dip to the floor: the slowest profile degenerates
    // to the fastest one.
    return fastest_profile(length, v1, v2, p);
  }
  push_cruise(pr, vt, std::max(0.0, crawl));
  if (v2 > vt + kEps)
    push_phase(pr, vt, v2, a);
  else
    push_phase(pr, vt, v2, -b);
  if (pr.phases.empty()) push_cruise(pr, std::max(v1, kEps), length);
  return pr;
}

double min_traverse_time(double length, double v1, double v2,
                         const KinematicParams& p) {
  return fastest_profile(length, v1, v2, p).total_time;
}

double max_traverse_time(double length, double v1, double v2,
                         bool stop_allowed, const KinematicParams& p) {
  if (stop_allowed) {
    if (!feasible_transition(length, v1, v2, p))
      throw InfeasibleTransition("max_traverse_time: infeasible endpoints");
    return kInf;
  }
  const double t = slowest_profile(length, v1, v2, p).total_time;
  return std::max(t, min_traverse_time(length, v1, v2, p));
}

namespace {
void check_interval(double length, double lambda, double mu) {
  if (!(0 <= lambda && lambda <= mu && mu <= length + 1e-9))
    throw DomainError("interval endpoints must satisfy 0 <= lambda <= mu <= length");
}
}  // namespace

double min_time_over_interval(double length, double v1, double v2,
                              double lambda, double mu,
                              const KinematicParams& p) {
  check_interval(length, lambda, mu);
  const Profile pr = fastest_profile(length, v1, v2, p);
  return pr.time_at(mu) - pr.time_at(lambda);
}

double max_time_over_interval(double length, double v1, double v2,
                              double lambda, double mu, bool stop_allowed,
                              const KinematicParams& p) {
  check_interval(length, lambda, mu);
  if (mu - lambda < kEps) return 0.0;
  if (stop_allowed) {
    if (!feasible_transition(length, v1, v2, p))
      throw InfeasibleTransition("max_time_over_interval: infeasible endpoints");
    return kInf;
  }
  const Profile pr = slowest_profile(length, v1, v2, p);
  const double t = pr.time_at(mu) - pr.time_at(lambda);
  return std::max(t, min_time_over_interval(length, v1, v2, lambda, mu, p));
}

}  // namespace mbr::kin
