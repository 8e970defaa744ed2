#include "mbr/extended_graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace mbr {

namespace {
constexpr double kSpeedEps = 1e-6;
}

int SpeedSet::index_of(double p) const {
  for (size_t i = 0; i < speeds.size(); ++i)
    if (std::abs(speeds[i] - p) < kSpeedEps) return static_cast<int>(i);
  return -1;
}

kin::KinematicParams ExtendedGraph::edge_params(const Instance& inst,
                                                int edge) const {
  const Train& tr = inst.trains[train];
  kin::KinematicParams p;
  p.v_max = std::min(tr.max_speed_mps, inst.network.edges[edge].speed_limit_mps);
  p.accel = tr.accel_mps2;
  p.decel = tr.decel_mps2;
  p.v_floor = std::min(v_floor, 0.5 * p.v_max);
  return p;
}

ExtendedGraph build_extended_graph(const Instance& inst, int train_idx,
                                   double delta_v, double v_floor) {
  if (delta_v <= 0) throw DomainError("delta_v must be > 0");
  const Network& net = inst.network;
  const Train& tr = inst.trains[train_idx];
  const Demand& dem = inst.demand(train_idx);

  ExtendedGraph g;
  g.train = train_idx;
  g.delta_v = delta_v;
  g.v_floor = v_floor;
  g.speed_sets.resize(net.vertices.size());
  g.out_ext.resize(net.vertices.size());
  g.in_ext.resize(net.vertices.size());
  g.ext_of_edge.resize(net.edges.size());
  g.edge_usable.assign(net.edges.size(), 0);

  for (size_t v = 0; v < net.vertices.size(); ++v) {
    SpeedSet& ss = g.speed_sets[v];
    ss.vertex = static_cast<int>(v);
    double best_limit = 0;
    for (int e : net.out_edges[v])
      best_limit = std::max(best_limit, net.edges[e].speed_limit_mps);
    for (int e : net.in_edges[v])
      best_limit = std::max(best_limit, net.edges[e].speed_limit_mps);
    if (best_limit <= 0) {  // isolated vertex: standstill only
      ss.speeds = {0.0};
      continue;
    }
    const double cap = std::min(tr.max_speed_mps, best_limit);
    std::vector<double> vals;
    for (int k = 0; k * delta_v < cap - kSpeedEps; ++k)
      vals.push_back(k * delta_v);
    vals.push_back(cap);
    if (static_cast<int>(v) == dem.entry_vertex) {
      double es = dem.entry_speed_mps;
      if (es <= cap + kSpeedEps) vals.push_back(std::min(es, cap));
    }
    std::sort(vals.begin(), vals.end());
    for (double p : vals)
      if (ss.speeds.empty() || p > ss.speeds.back() + kSpeedEps)
        ss.speeds.push_back(p);
  }

  for (size_t e = 0; e < net.edges.size(); ++e) {
    const Edge& edge = net.edges[e];
    const auto params = g.edge_params(inst, static_cast<int>(e));
    const SpeedSet& su = g.speed_sets[edge.from];
    const SpeedSet& sv = g.speed_sets[edge.to];
    for (size_t i = 0; i < su.speeds.size(); ++i) {
      const double p1 = su.speeds[i];
      if (p1 > edge.speed_limit_mps + kSpeedEps) continue;
      for (size_t j = 0; j < sv.speeds.size(); ++j) {
        const double p2 = sv.speeds[j];
        if (p2 > edge.speed_limit_mps + kSpeedEps) continue;
        if (p1 > params.v_max + kSpeedEps || p2 > params.v_max + kSpeedEps)
          continue;
        if (!kin::feasible_transition(edge.length_m, p1, p2, params)) continue;
        ExtendedEdge xe;
        xe.base_edge = static_cast<int>(e);
        xe.s1 = static_cast<int>(i);
        xe.s2 = static_cast<int>(j);
        xe.p1 = p1;
        xe.p2 = p2;
        xe.tau_min = kin::min_traverse_time(edge.length_m, p1, p2, params);
        xe.tau_max = kin::max_traverse_time(edge.length_m, p1, p2,
                                            edge.stop_allowed, params);
        const int id = static_cast<int>(g.edges.size());
        g.edges.push_back(xe);
        g.out_ext[edge.from].push_back(id);
        g.in_ext[edge.to].push_back(id);
        g.ext_of_edge[e].push_back(id);
        g.edge_usable[e] = 1;
      }
    }
  }

  for (const Station& st : inst.stations) {
    auto spots = stop_candidates(net, st, tr);
    g.stop_vertices[st.name] = spots;
  }
  return g;
}

std::vector<int> stop_candidates(const Network& net, const Station& station,
                                 const Train& train) {
  std::set<int> station_edges(station.edges.begin(), station.edges.end());
  // Does some backward-contiguous chain of station edges ending at v cover
  // the train? Simple-path DFS; station subgraphs are tiny.
  std::function<bool(int, double, std::set<int>&)> dfs =
      [&](int u, double acc, std::set<int>& on_path) -> bool {
    if (acc >= train.length_m - 1e-9) return true;
    for (int e : net.in_edges[u]) {
      if (!station_edges.count(e)) continue;
      int w = net.edges[e].from;
      if (on_path.count(w)) continue;
      on_path.insert(w);
      if (dfs(w, acc + net.edges[e].length_m, on_path)) return true;
      on_path.erase(w);
    }
    return false;
  };
  auto covers = [&](int v) {
    std::set<int> on_path{v};
    return dfs(v, 0.0, on_path);
  };
  std::set<int> heads;
  for (int e : station.edges) heads.insert(net.edges[e].to);
  std::vector<int> out;
  for (int v : heads)
    if (covers(v)) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mbr
