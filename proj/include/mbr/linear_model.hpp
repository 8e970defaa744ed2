#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mbr/errors.hpp"

namespace mbr {

enum class Sense { LE, EQ, GE };

// Uniform constraint currency handed to the backend and to the lazy engine.
// `tag` identifies the constraint family and instance (used for novelty
// checks and the model dump).
struct LinearConstraint {
  std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  Sense sense = Sense::LE;
  double rhs = 0;
  std::string tag;
};

enum class SolveStatus { Optimal, Infeasible, TimeLimit };

struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  bool has_values = false;
  std::vector<double> values;
  double objective = 0;
  double best_bound = 0;
};

struct BackendCapabilities {
  bool supports_warm_start = false;
  bool supports_abs_gap = false;
  long max_vars = 0;
};

// Contract every MILP engine adapter fulfils. Incremental re-solves after
// adding rows must be permitted; warm starts should be exploited when the
// engine supports them.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;

  virtual int add_binary() = 0;
  virtual int add_continuous(double lb, double ub) = 0;
  virtual int num_vars() const = 0;
  virtual void add_constraint(const LinearConstraint& c) = 0;
  // Minimization objective: sum of terms plus a constant offset.
  virtual void set_objective(const std::vector<std::pair<int, double>>& terms,
                             double offset) = 0;
  // Hint the next solve with a full-length candidate assignment.
  virtual void suggest_solution(const std::vector<double>& values) = 0;
  virtual SolveOutcome solve(double gap_abs, double time_limit_s) = 0;
  virtual BackendCapabilities capabilities() const = 0;
  // Export the current model in LP text format.
  virtual void write_model_lp(const std::string& path) = 0;
};

}  // namespace mbr
