#pragma once

#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "mbr/extended_graph.hpp"
#include "mbr/instance.hpp"
#include "mbr/linear_model.hpp"
#include "mbr/solve_config.hpp"

namespace mbr {

// Solver variables of one train's sub-model.
struct TrainVars {
  std::unordered_map<int, int> x;          // base edge -> binary
  std::vector<int> y;                      // extended edge id -> binary
  std::unordered_map<int, int> a_front;    // vertex -> front arrival
  std::unordered_map<int, int> d_front;    // vertex -> front departure
  std::unordered_map<int, int> d_rear;     // vertex -> rear departure
  std::map<std::pair<int, int>, int> stop; // (stop idx, vertex) -> binary
  std::vector<int> vertices;               // vertices carrying timing vars
};

struct VariableIndex {
  std::vector<TrainVars> trains;
  // (follower, leader, edge) -> binary "follower follows leader on edge"
  std::map<std::tuple<int, int, int>, int> order;
  // (t1, t2, segment) with t1 < t2 -> binary "t1 passes first"
  std::map<std::tuple<int, int, int>, int> seg_order;
};

// A MILP under construction: backend handle, the symbol->variable map, and
// every row added so far (kept for the dump, tag novelty and row evaluation).
struct ModelContext {
  const Instance* inst = nullptr;
  const std::vector<ExtendedGraph>* graphs = nullptr;
  SolveConfig cfg;
  SolverBackend* backend = nullptr;

  VariableIndex vars;
  std::vector<LinearConstraint> rows;
  std::set<std::string> row_tags;
  std::set<std::string> added_units;  // headway cut ids present in the model

  const ExtendedGraph& graph(int train) const { return (*graphs)[train]; }

  // Adds the row unless its tag is already present; returns true when added.
  bool add_row(LinearConstraint c);
  bool has_tag(const std::string& tag) const { return row_tags.count(tag) > 0; }

  void dump(std::ostream& os) const;  // one `tag | terms | sense | rhs` per line
};

// t_out upper bound of the train's demand, the paper's suggested big-M.
double big_M(const Instance& inst, int train);

// Builds everything except headways: movement, travel times, stops, track
// release, timetable, entry/exit windows and the objective.
void build_base_model(ModelContext& ctx);

void add_track_release(ModelContext& ctx, int train);
void add_timetable(ModelContext& ctx, int train);
void set_objective(ModelContext& ctx);

}  // namespace mbr
