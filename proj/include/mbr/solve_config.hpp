#pragma once

#include <string>

#include "mbr/errors.hpp"

namespace mbr {

enum class Strategy {
  FullModel,
  AllChecked,
  AdjacentAll,
  AdjacentViolated,
  FirstViolation,
};

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct SolveConfig {
  Strategy strategy = Strategy::AdjacentViolated;
  double gap_abs = 10.0;            // absolute objective gap, seconds
  double time_limit_s = 300.0;
  double delta_v = 10.0 / 3.6;      // speed grid step (10 km/h)
  double buffer_m = 0.0;            // extra headway clearance
  double v_floor = 0.5;             // crawl speed for slowest profiles
  int max_release_paths = 64;       // per (train, vertex) enumeration cap
  double violation_tolerance = 1e-6;
  double validate_tolerance = 1e-4;

  void validate() const {
    if (gap_abs < 0) throw DomainError("gap_abs must be >= 0");
    if (time_limit_s <= 0) throw DomainError("time_limit must be > 0");
    if (delta_v <= 0) throw DomainError("delta_v must be > 0");
    if (buffer_m < 0) throw DomainError("buffer must be >= 0");
    if (v_floor <= 0) throw DomainError("v_floor must be > 0");
    if (max_release_paths <= 0) throw DomainError("max_release_paths must be > 0");
  }
};

}  // namespace mbr
