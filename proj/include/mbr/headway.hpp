#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbr/milp_model.hpp"

namespace mbr {

// Maximal chain of bidirectionally-paired edges between vertices of
// degree != 2; behaves like a fixed detection section for opposing traffic.
struct TrackSegment {
  std::string id;
  std::vector<int> vertices;   // chain v0 .. vm
  std::vector<int> fwd_edges;  // v_i -> v_{i+1}
  std::vector<int> rev_edges;  // v_{i+1} -> v_i (aligned with fwd_edges)
};

std::vector<TrackSegment> compute_track_segments(const Network& net);

// One lazily addable headway cut: either the same-direction clearance rows
// of (follower, leader, edge, follower-speed) or the opposite-direction
// exclusion of (pair, segment). Bookkeeping rows (ordering binaries and
// their definitions) ride along but are not counted as cuts.
struct HeadwayUnit {
  std::string id;
  std::vector<LinearConstraint> clearance_rows;
  std::vector<LinearConstraint> bookkeeping_rows;
};

// Orders the pair on `edge` and requires the follower arriving at the
// edge's tail with speed index `speed_idx` to wait until the leader's rear
// has cleared braking_distance(speed) + buffer ahead along the leader's
// route. `leader_route`, when given, restricts the clearance covers to the
// candidate route; otherwise all usable continuations are enumerated.
HeadwayUnit same_direction_unit(ModelContext& ctx, int follower, int leader,
                                int edge, int speed_idx,
                                const std::vector<int>* leader_route);

// Serializes opposing traversals of one segment: a train may enter only
// once the opposing train has entirely left it.
HeadwayUnit opposite_direction_unit(ModelContext& ctx, int t1, int t2,
                                    const TrackSegment& seg);

// Adds a unit's rows to the model (bookkeeping first); returns the number of
// clearance rows actually added (0 if the unit was already present).
int add_unit(ModelContext& ctx, const HeadwayUnit& unit);

struct EagerHeadways {
  long units = 0;
  long rows = 0;
};

// The Full Model constraint set: every ordered pair, shared usable edge and
// follower speed, plus every opposing segment pair. Adds to the model.
EagerHeadways enumerate_all_headway_constraints(
    ModelContext& ctx, const std::vector<TrackSegment>& segments);

}  // namespace mbr
