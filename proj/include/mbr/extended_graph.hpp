#pragma once

#include <map>
#include <string>
#include <vector>

#include "mbr/instance.hpp"
#include "mbr/kinematics.hpp"

namespace mbr {

// Discretized speeds a train may have at one vertex. Always contains 0 and
// the cap (min of train top speed and the best incident edge limit).
struct SpeedSet {
  int vertex = -1;
  std::vector<double> speeds;  // strictly increasing

  int index_of(double p) const;  // -1 if absent (1e-6 tolerance)
};

// One velocity transition over a base edge, with its travel-time range.
struct ExtendedEdge {
  int base_edge = -1;
  int s1 = -1, s2 = -1;  // indices into the endpoint speed sets
  double p1 = 0, p2 = 0;
  double tau_min = 0;
  double tau_max = 0;  // kin::kInf when stopping on the edge is allowed
};

struct ExtendedGraph {
  int train = -1;
  double delta_v = 0;
  double v_floor = 0;
  std::vector<SpeedSet> speed_sets;            // per vertex index
  std::vector<ExtendedEdge> edges;
  std::vector<std::vector<int>> out_ext;       // per vertex: extended edge ids
  std::vector<std::vector<int>> in_ext;
  std::vector<std::vector<int>> ext_of_edge;   // per base edge
  std::vector<char> edge_usable;               // base edge has >= 1 extension
  std::map<std::string, std::vector<int>> stop_vertices;  // station -> vertices

  // Params used to traverse a base edge (cap = min(train cap, edge limit)).
  kin::KinematicParams edge_params(const Instance& inst, int edge) const;
};

// Builds the per-train extended graph. Speeds are the uniform grid
// {0, dv, 2dv, ...} clipped to the vertex cap, plus the cap itself and the
// train's entry speed at its entry vertex.
ExtendedGraph build_extended_graph(const Instance& inst, int train_idx,
                                   double delta_v, double v_floor);

// Vertices where the train's front can stop with the whole train inside the
// station: v heads a backward-contiguous chain of station edges whose total
// length covers the train.
std::vector<int> stop_candidates(const Network& net, const Station& station,
                                 const Train& train);

}  // namespace mbr
