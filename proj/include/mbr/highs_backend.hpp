#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mbr/linear_model.hpp"

namespace mbr {

// SolverBackend realized against HiGHS, driven through a persistent Python
// worker process (HiGHS ships in this environment only as scipy's bundled
// pybind module). Model deltas are batched client-side and flushed with each
// solve, so an iteration costs one request/response round trip.
class HighsSubprocessBackend : public SolverBackend {
 public:
  HighsSubprocessBackend();
  ~HighsSubprocessBackend() override;

  HighsSubprocessBackend(const HighsSubprocessBackend&) = delete;
  HighsSubprocessBackend& operator=(const HighsSubprocessBackend&) = delete;

  int add_binary() override;
  int add_continuous(double lb, double ub) override;
  int num_vars() const override { return num_vars_; }
  void add_constraint(const LinearConstraint& c) override;
  void set_objective(const std::vector<std::pair<int, double>>& terms,
                     double offset) override;
  void suggest_solution(const std::vector<double>& values) override;
  SolveOutcome solve(double gap_abs, double time_limit_s) override;
  BackendCapabilities capabilities() const override;
  void write_model_lp(const std::string& path) override;

 private:
  struct Process;
  std::string exchange(const std::string& request);
  std::string flush_payload() const;
  void clear_pending();

  std::unique_ptr<Process> proc_;
  int num_vars_ = 0;

  // pending deltas since the last flush
  std::vector<double> p_lb_, p_ub_;
  std::vector<bool> p_int_;
  std::vector<double> p_row_lo_, p_row_hi_;
  std::vector<int> p_row_starts_, p_row_index_;
  std::vector<double> p_row_value_;
  bool obj_dirty_ = false;
  std::map<int, double> costs_;       // current nonzero objective costs
  std::map<int, double> cost_delta_;  // changes to send
  double obj_offset_ = 0;
  std::vector<double> warm_;
};

}  // namespace mbr
