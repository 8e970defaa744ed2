#include "mbr/instance.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mbr/extended_graph.hpp"

namespace mbr {

using nlohmann::json;

int Network::vertex(const std::string& id) const {
  auto it = vertex_index.find(id);
  if (it == vertex_index.end()) throw Error("unknown vertex: " + id);
  return it->second;
}

int Network::edge(const std::string& id) const {
  auto it = edge_index.find(id);
  if (it == edge_index.end()) throw Error("unknown edge: " + id);
  return it->second;
}

void Network::rebuild_adjacency() {
  out_edges.assign(vertices.size(), {});
  in_edges.assign(vertices.size(), {});
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    out_edges[edges[e].from].push_back(e);
    in_edges[edges[e].to].push_back(e);
  }
}

const Demand& Instance::demand(int train_idx) const {
  return demands[demand_of_train.at(train_idx)];
}

int Instance::train(const std::string& id) const {
  auto it = train_index.find(id);
  if (it == train_index.end()) throw Error("unknown train: " + id);
  return it->second;
}

int Instance::station(const std::string& name) const {
  auto it = station_index.find(name);
  if (it == station_index.end()) throw Error("unknown station: " + name);
  return it->second;
}

namespace {

std::string idx_path(const std::string& base, size_t i,
                     const std::string& field = "") {
  std::string p = base + "[" + std::to_string(i) + "]";
  if (!field.empty()) p += "." + field;
  return p;
}

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(path + ": missing field '" + key + "'");
  return j.at(key);
}

double need_num(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number())
    throw ParseError(path + "." + key + ": expected a number");
  return v.get<double>();
}

std::string need_str(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_string())
    throw ParseError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::pair<double, double> need_window(const json& j, const char* key,
                                      const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(path + "." + key + ": expected [lo, hi]");
  auto w = std::make_pair(v[0].get<double>(), v[1].get<double>());
  if (w.first > w.second)
    throw ValidationError(path + "." + key, "window lower bound exceeds upper");
  return w;
}

// Network-level reachability, ignoring velocities.
std::vector<char> reachable_from(const Network& net, int v0) {
  std::vector<char> seen(net.vertices.size(), 0);
  std::vector<int> stack{v0};
  seen[v0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : net.out_edges[v])
      if (!seen[net.edges[e].to]) {
        seen[net.edges[e].to] = 1;
        stack.push_back(net.edges[e].to);
      }
  }
  return seen;
}

std::vector<char> coreachable_to(const Network& net, int v0) {
  std::vector<char> seen(net.vertices.size(), 0);
  std::vector<int> stack{v0};
  seen[v0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : net.in_edges[v])
      if (!seen[net.edges[e].from]) {
        seen[net.edges[e].from] = 1;
        stack.push_back(net.edges[e].from);
      }
  }
  return seen;
}

}  // namespace

Instance load_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("top level must be an object");

  Instance inst;
  Network& net = inst.network;

  // --- network ---
  const json& jnet = need(doc, "network", "$");
  const json& jverts = need(jnet, "vertices", "network");
  if (!jverts.is_array()) throw ParseError("network.vertices: expected array");
  for (size_t i = 0; i < jverts.size(); ++i) {
    if (!jverts[i].is_string())
      throw ParseError(idx_path("network.vertices", i) + ": expected string");
    std::string id = jverts[i].get<std::string>();
    if (net.vertex_index.count(id))
      throw ValidationError(idx_path("network.vertices", i),
                            "duplicate vertex id '" + id + "'");
    net.vertex_index[id] = static_cast<int>(net.vertices.size());
    net.vertices.push_back(id);
  }

  const json& jedges = need(jnet, "edges", "network");
  if (!jedges.is_array()) throw ParseError("network.edges: expected array");
  std::set<std::pair<int, int>> seen_pairs;
  std::vector<std::string> reverse_refs(jedges.size());
  for (size_t i = 0; i < jedges.size(); ++i) {
    const std::string path = idx_path("network.edges", i);
    const json& je = jedges[i];
    Edge e;
    e.id = need_str(je, "id", path);
    if (net.edge_index.count(e.id))
      throw ValidationError(path + ".id", "duplicate edge id '" + e.id + "'");
    std::string from = need_str(je, "from", path);
    std::string to = need_str(je, "to", path);
    if (!net.vertex_index.count(from))
      throw ValidationError(path + ".from", "unknown vertex '" + from + "'");
    if (!net.vertex_index.count(to))
      throw ValidationError(path + ".to", "unknown vertex '" + to + "'");
    e.from = net.vertex_index[from];
    e.to = net.vertex_index[to];
    if (e.from == e.to)
      throw ValidationError(path + ".to", "self-loop edges are not allowed");
    if (!seen_pairs.insert({e.from, e.to}).second)
      throw ValidationError(path, "duplicate edge for vertex pair " + from +
                                      " -> " + to);
    e.length_m = need_num(je, "length_m", path);
    if (e.length_m <= 0)
      throw ValidationError(path + ".length_m", "must be > 0");
    e.speed_limit_mps = need_num(je, "speed_limit_mps", path);
    if (e.speed_limit_mps <= 0)
      throw ValidationError(path + ".speed_limit_mps", "must be > 0");
    if (je.contains("stop_allowed")) {
      if (!je["stop_allowed"].is_boolean())
        throw ParseError(path + ".stop_allowed: expected boolean");
      e.stop_allowed = je["stop_allowed"].get<bool>();
    }
    if (je.contains("reverse_of") && !je["reverse_of"].is_null())
      reverse_refs[i] = need_str(je, "reverse_of", path);
    net.edge_index[e.id] = static_cast<int>(net.edges.size());
    net.edges.push_back(e);
  }
  for (size_t i = 0; i < reverse_refs.size(); ++i) {
    if (reverse_refs[i].empty()) continue;
    const std::string path = idx_path("network.edges", i, "reverse_of");
    auto it = net.edge_index.find(reverse_refs[i]);
    if (it == net.edge_index.end())
      throw ValidationError(path, "unknown edge '" + reverse_refs[i] + "'");
    net.edges[i].reverse_of = it->second;
  }
  for (size_t i = 0; i < net.edges.size(); ++i) {
    const Edge& e = net.edges[i];
    if (e.reverse_of < 0) continue;
    const std::string path = idx_path("network.edges", i, "reverse_of");
    const Edge& r = net.edges[e.reverse_of];
    if (e.reverse_of == static_cast<int>(i))
      throw ValidationError(path, "edge cannot be its own reverse");
    if (r.from != e.to || r.to != e.from)
      throw ValidationError(path, "reverse edge endpoints are not swapped");
    if (std::abs(r.length_m - e.length_m) > 1e-9)
      throw ValidationError(path, "reverse edge length differs");
    if (r.reverse_of != static_cast<int>(i))
      throw ValidationError(path, "reverse pairing is not symmetric");
  }
  net.rebuild_adjacency();

  // --- trains ---
  const json& jtrains = need(doc, "trains", "$");
  if (!jtrains.is_array()) throw ParseError("trains: expected array");
  for (size_t i = 0; i < jtrains.size(); ++i) {
    const std::string path = idx_path("trains", i);
    const json& jt = jtrains[i];
    Train t;
    t.id = need_str(jt, "id", path);
    if (inst.train_index.count(t.id))
      throw ValidationError(path + ".id", "duplicate train id '" + t.id + "'");
    t.length_m = need_num(jt, "length_m", path);
    t.max_speed_mps = need_num(jt, "max_speed_mps", path);
    t.accel_mps2 = need_num(jt, "acceleration_mps2", path);
    t.decel_mps2 = need_num(jt, "deceleration_mps2", path);
    if (t.length_m <= 0) throw ValidationError(path + ".length_m", "must be > 0");
    if (t.max_speed_mps <= 0)
      throw ValidationError(path + ".max_speed_mps", "must be > 0");
    if (t.accel_mps2 <= 0)
      throw ValidationError(path + ".acceleration_mps2", "must be > 0");
    if (t.decel_mps2 <= 0)
      throw ValidationError(path + ".deceleration_mps2", "must be > 0");
    inst.train_index[t.id] = static_cast<int>(inst.trains.size());
    inst.trains.push_back(t);
  }

  // --- stations ---
  if (doc.contains("stations")) {
    const json& jstations = doc["stations"];
    if (!jstations.is_array()) throw ParseError("stations: expected array");
    for (size_t i = 0; i < jstations.size(); ++i) {
      const std::string path = idx_path("stations", i);
      const json& js = jstations[i];
      Station s;
      s.name = need_str(js, "name", path);
      if (inst.station_index.count(s.name))
        throw ValidationError(path + ".name",
                              "duplicate station '" + s.name + "'");
      const json& jse = need(js, "edges", path);
      if (!jse.is_array() || jse.empty())
        throw ValidationError(path + ".edges", "must be a nonempty edge list");
      for (size_t k = 0; k < jse.size(); ++k) {
        if (!jse[k].is_string())
          throw ParseError(idx_path(path + ".edges", k) + ": expected string");
        std::string eid = jse[k].get<std::string>();
        if (!net.edge_index.count(eid))
          throw ValidationError(idx_path(path + ".edges", k),
                                "unknown edge '" + eid + "'");
        s.edges.push_back(net.edge_index[eid]);
      }
      inst.station_index[s.name] = static_cast<int>(inst.stations.size());
      inst.stations.push_back(s);
    }
  }

  // --- demands ---
  const json& jdemands = need(doc, "demands", "$");
  if (!jdemands.is_array()) throw ParseError("demands: expected array");
  inst.demand_of_train.assign(inst.trains.size(), -1);
  for (size_t i = 0; i < jdemands.size(); ++i) {
    const std::string path = idx_path("demands", i);
    const json& jd = jdemands[i];
    Demand d;
    std::string train_id = need_str(jd, "train", path);
    if (!inst.train_index.count(train_id))
      throw ValidationError(path + ".train", "unknown train '" + train_id + "'");
    d.train = inst.train_index[train_id];
    if (inst.demand_of_train[d.train] >= 0)
      throw ValidationError(path + ".train",
                            "multiple demands for train '" + train_id + "'");
    d.weight = need_num(jd, "weight", path);
    if (d.weight < 0) throw ValidationError(path + ".weight", "must be >= 0");
    std::string ev = need_str(jd, "entry_vertex", path);
    if (!net.vertex_index.count(ev))
      throw ValidationError(path + ".entry_vertex", "unknown vertex '" + ev + "'");
    d.entry_vertex = net.vertex_index[ev];
    std::string xv = need_str(jd, "exit_vertex", path);
    if (!net.vertex_index.count(xv))
      throw ValidationError(path + ".exit_vertex", "unknown vertex '" + xv + "'");
    d.exit_vertex = net.vertex_index[xv];
    if (d.exit_vertex == d.entry_vertex)
      throw ValidationError(path + ".exit_vertex",
                            "entry and exit vertex must differ");
    d.entry_speed_mps = need_num(jd, "entry_speed_mps", path);
    if (d.entry_speed_mps < 0)
      throw ValidationError(path + ".entry_speed_mps", "must be >= 0");
    if (d.entry_speed_mps > inst.trains[d.train].max_speed_mps + 1e-9)
      throw ValidationError(path + ".entry_speed_mps",
                            "exceeds the train's maximal speed");
    std::tie(d.entry_lo, d.entry_hi) = need_window(jd, "entry_window_s", path);
    std::tie(d.exit_lo, d.exit_hi) = need_window(jd, "exit_window_s", path);
    if (!(d.entry_lo < d.exit_hi))
      throw ValidationError(path + ".exit_window_s",
                            "exit window must end after the entry window opens");
    if (jd.contains("stops")) {
      const json& jstops = jd["stops"];
      if (!jstops.is_array()) throw ParseError(path + ".stops: expected array");
      for (size_t k = 0; k < jstops.size(); ++k) {
        const std::string spath = idx_path(path + ".stops", k);
        const json& jst = jstops[k];
        StopRequest sr;
        sr.station = need_str(jst, "station", spath);
        if (!inst.station_index.count(sr.station))
          throw ValidationError(spath + ".station",
                                "unknown station '" + sr.station + "'");
        std::tie(sr.arrival_lo, sr.arrival_hi) =
            need_window(jst, "arrival_window_s", spath);
        std::tie(sr.departure_lo, sr.departure_hi) =
            need_window(jst, "departure_window_s", spath);
        sr.min_dwell_s = need_num(jst, "min_dwell_s", spath);
        if (sr.min_dwell_s < 0)
          throw ValidationError(spath + ".min_dwell_s", "must be >= 0");
        if (sr.arrival_lo + sr.min_dwell_s > sr.departure_hi + 1e-9)
          throw ValidationError(
              spath, "stop is unsatisfiable: earliest arrival plus dwell "
                     "exceeds the departure window");
        d.stops.push_back(sr);
      }
    }
    inst.demand_of_train[d.train] = static_cast<int>(inst.demands.size());
    inst.demands.push_back(d);
  }
  for (size_t t = 0; t < inst.trains.size(); ++t)
    if (inst.demand_of_train[t] < 0)
      throw ValidationError(idx_path("trains", t),
                            "train '" + inst.trains[t].id + "' has no demand");

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      throw ParseError("seed: expected an unsigned integer");
    inst.seed = doc["seed"].get<unsigned long long>();
  }

  // Stop placements: each requested stop must admit at least one eligible
  // vertex lying on some entry->exit path of its train.
  for (size_t i = 0; i < inst.demands.size(); ++i) {
    const Demand& d = inst.demands[i];
    if (d.stops.empty()) continue;
    auto fwd = reachable_from(net, d.entry_vertex);
    auto bwd = coreachable_to(net, d.exit_vertex);
    for (size_t k = 0; k < d.stops.size(); ++k) {
      const Station& st = inst.stations[inst.station_index.at(d.stops[k].station)];
      auto spots = stop_candidates(net, st, inst.trains[d.train]);
      bool ok = std::any_of(spots.begin(), spots.end(),
                            [&](int v) { return fwd[v] && bwd[v]; });
      if (!ok)
        throw ValidationError(
            idx_path(idx_path("demands", i) + ".stops", k, "station"),
            "no stop placement for train '" + inst.trains[d.train].id +
                "' fits inside station '" + d.stops[k].station +
                "' on an entry->exit path");
    }
  }

  return inst;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_instance(ss.str());
}

std::string save_instance(const Instance& inst) {
  const Network& net = inst.network;
  json doc;
  doc["network"]["vertices"] = net.vertices;
  json edges = json::array();
  for (const Edge& e : net.edges) {
    json je;
    je["id"] = e.id;
    je["from"] = net.vertices[e.from];
    je["to"] = net.vertices[e.to];
    je["length_m"] = e.length_m;
    je["speed_limit_mps"] = e.speed_limit_mps;
    je["stop_allowed"] = e.stop_allowed;
    if (e.reverse_of >= 0) je["reverse_of"] = net.edges[e.reverse_of].id;
    edges.push_back(je);
  }
  doc["network"]["edges"] = edges;
  json trains = json::array();
  for (const Train& t : inst.trains) {
    json jt;
    jt["id"] = t.id;
    jt["length_m"] = t.length_m;
    jt["max_speed_mps"] = t.max_speed_mps;
    jt["acceleration_mps2"] = t.accel_mps2;
    jt["deceleration_mps2"] = t.decel_mps2;
    trains.push_back(jt);
  }
  doc["trains"] = trains;
  json stations = json::array();
  for (const Station& s : inst.stations) {
    json js;
    js["name"] = s.name;
    json se = json::array();
    for (int e : s.edges) se.push_back(net.edges[e].id);
    js["edges"] = se;
    stations.push_back(js);
  }
  doc["stations"] = stations;
  json demands = json::array();
  for (const Demand& d : inst.demands) {
    json jd;
    jd["train"] = inst.trains[d.train].id;
    jd["weight"] = d.weight;
    jd["entry_vertex"] = net.vertices[d.entry_vertex];
    jd["entry_speed_mps"] = d.entry_speed_mps;
    jd["entry_window_s"] = {d.entry_lo, d.entry_hi};
    jd["exit_vertex"] = net.vertices[d.exit_vertex];
    jd["exit_window_s"] = {d.exit_lo, d.exit_hi};
    json stops = json::array();
    for (const StopRequest& sr : d.stops) {
      json js;
      js["station"] = sr.station;
      js["arrival_window_s"] = {sr.arrival_lo, sr.arrival_hi};
      js["departure_window_s"] = {sr.departure_lo, sr.departure_hi};
      js["min_dwell_s"] = sr.min_dwell_s;
      stops.push_back(js);
    }
    jd["stops"] = stops;
    demands.push_back(jd);
  }
  doc["demands"] = demands;
  if (inst.seed) doc["seed"] = *inst.seed;
  return doc.dump(2) + "\n";
}

SharedEdges shared_edges(const Instance& inst, const std::vector<int>& route_a,
                         const std::vector<int>& route_b) {
  const Network& net = inst.network;
  auto check_connected = [&](const std::vector<int>& r, const char* name) {
    for (size_t i = 0; i + 1 < r.size(); ++i)
      if (net.edges[r[i]].to != net.edges[r[i + 1]].from)
        throw InvalidRoute(std::string("route ") + name +
                           " is not a connected edge path");
  };
  check_connected(route_a, "a");
  check_connected(route_b, "b");
  std::set<int> in_b(route_b.begin(), route_b.end());
  SharedEdges out;
  std::set<int> emitted_same, emitted_opp;
  for (int e : route_a) {
    if (in_b.count(e) && emitted_same.insert(e).second)
      out.same_direction.push_back(e);
    int r = net.edges[e].reverse_of;
    if (r >= 0 && in_b.count(r) && emitted_opp.insert(e).second)
      out.opposite_direction.push_back(e);
  }
  std::sort(out.same_direction.begin(), out.same_direction.end());
  std::sort(out.opposite_direction.begin(), out.opposite_direction.end());
  return out;
}

}  // namespace mbr
