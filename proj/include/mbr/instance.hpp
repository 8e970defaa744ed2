#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mbr/errors.hpp"

namespace mbr {

struct Train {
  std::string id;
  double length_m = 0;
  double max_speed_mps = 0;
  double accel_mps2 = 0;
  double decel_mps2 = 0;
};

struct Edge {
  std::string id;
  int from = -1;
  int to = -1;
  double length_m = 0;
  double speed_limit_mps = 0;
  bool stop_allowed = false;
  int reverse_of = -1;  // paired opposite-direction edge, -1 if unidirectional
};

struct Network {
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::map<std::string, int> vertex_index;
  std::map<std::string, int> edge_index;
  std::vector<std::vector<int>> out_edges;  // per vertex
  std::vector<std::vector<int>> in_edges;

  int vertex(const std::string& id) const;
  int edge(const std::string& id) const;
  void rebuild_adjacency();
};

struct Station {
  std::string name;
  std::vector<int> edges;
};

struct StopRequest {
  std::string station;
  double arrival_lo = 0, arrival_hi = 0;
  double departure_lo = 0, departure_hi = 0;
  double min_dwell_s = 0;
};

struct Demand {
  int train = -1;
  double weight = 1;
  int entry_vertex = -1;
  double entry_speed_mps = 0;
  double entry_lo = 0, entry_hi = 0;
  int exit_vertex = -1;
  double exit_lo = 0, exit_hi = 0;
  std::vector<StopRequest> stops;
};

// Immutable after load; safe to share across concurrent solves.
struct Instance {
  Network network;
  std::vector<Train> trains;
  std::vector<Station> stations;
  std::vector<Demand> demands;  // exactly one per train, in document order
  std::optional<unsigned long long> seed;  // present for generated instances

  std::map<std::string, int> train_index;
  std::map<std::string, int> station_index;
  std::vector<int> demand_of_train;  // train idx -> demand idx

  const Demand& demand(int train_idx) const;
  int train(const std::string& id) const;
  int station(const std::string& name) const;
};

// Parses and fully validates an instance document (JSON).
Instance load_instance(const std::string& text);
Instance load_instance_file(const std::string& path);

// Inverse of load_instance; load(save(i)) is structurally equal to i.
std::string save_instance(const Instance& inst);

struct SharedEdges {
  std::vector<int> same_direction;
  std::vector<int> opposite_direction;
};

// Edges two connected routes have in common, split into same-direction use
// and reverse-paired (opposing) use. Routes are edge-index paths.
SharedEdges shared_edges(const Instance& inst, const std::vector<int>& route_a,
                         const std::vector<int>& route_b);

}  // namespace mbr
