#pragma once

#include <limits>
#include <vector>

#include "mbr/errors.hpp"

namespace mbr::kin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-traversal envelope: v_max is the cap for the whole move (already the
// minimum of the train's top speed and the edge's limit), v_floor the crawl
// speed used by the slowest non-stopping profile (which is otherwise
// unbounded as speed tends to 0).
struct KinematicParams {
  double v_max;
  double accel;
  double decel;
  double v_floor = 0.5;

  void validate() const;
};

// v^2 / (2 b).
double braking_distance(double v, double decel);

// True iff a train can go from speed v1 to v2 over `length` meters,
// i.e. |v2^2 - v1^2| <= 2 * rate * length for the applicable rate.
bool feasible_transition(double length, double v1, double v2,
                         const KinematicParams& p);

// Fastest profile: accelerate to the peak (capped at v_max), cruise,
// decelerate to v2.
double min_traverse_time(double length, double v1, double v2,
                         const KinematicParams& p);

// Slowest profile that never stops: decelerate to the trough (floored at
// v_floor), crawl, speed back up to v2. Infinity when stopping on the edge
// is allowed.
double max_traverse_time(double length, double v1, double v2,
                         bool stop_allowed, const KinematicParams& p);

// Time spent between track positions lambda and mu under the fastest /
// slowest endpoint-consistent profile.
double min_time_over_interval(double length, double v1, double v2,
                              double lambda, double mu,
                              const KinematicParams& p);
double max_time_over_interval(double length, double v1, double v2,
                              double lambda, double mu, bool stop_allowed,
                              const KinematicParams& p);

// Piecewise-constant-acceleration profile over one edge. Exposed so the
// interval oracles and their tests can share the position->time evaluation.
struct Profile {
  struct Phase {
    double v0;      // speed entering the phase
    double rate;    // signed acceleration
    double length;  // distance covered
    double time;    // duration
  };
  std::vector<Phase> phases;
  double total_time = 0;
  double total_length = 0;

  // Time at which the profile reaches position x (0 <= x <= total_length).
  double time_at(double x) const;
};

Profile fastest_profile(double length, double v1, double v2,
                        const KinematicParams& p);
Profile slowest_profile(double length, double v1, double v2,
                        const KinematicParams& p);

}  // namespace mbr::kin
